// Copyright 2026 The sdcagg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// sdcagg command-line front end. Talks to the library only through the C
// interface in sdcagg/sdcagg.h.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 method failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "sdcagg/sdcagg.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitMethod = 3;

int ExitCodeFor(sdcagg_status status) {
  switch (status) {
    case SDCAGG_OK:
      return kExitOk;
    case SDCAGG_ERR_INVALID_ARGUMENT:
    case SDCAGG_ERR_SPEC:
      return kExitUsage;
    case SDCAGG_ERR_IO:
    case SDCAGG_ERR_DATA:
      return kExitData;
    case SDCAGG_ERR_METHOD:
    case SDCAGG_ERR_INTERNAL:
      return kExitMethod;
  }
  return kExitMethod;
}

// Thrown to unwind to main with a status already reported.
struct Failure {
  int exit_code;
};

void Check(sdcagg_status status, const std::string& context) {
  if (status == SDCAGG_OK) return;
  std::cerr << "sdcagg: " << context << ": " << sdcagg_last_error() << "\n";
  throw Failure{ExitCodeFor(status)};
}

struct SchemaDeleter {
  void operator()(sdcagg_schema* p) const { sdcagg_schema_free(p); }
};
struct TableDeleter {
  void operator()(sdcagg_table* p) const { sdcagg_table_free(p); }
};
struct ResultDeleter {
  void operator()(sdcagg_result* p) const { sdcagg_result_free(p); }
};
struct ReportDeleter {
  void operator()(sdcagg_report* p) const { sdcagg_report_free(p); }
};
using SchemaPtr = std::unique_ptr<sdcagg_schema, SchemaDeleter>;
using TablePtr = std::unique_ptr<sdcagg_table, TableDeleter>;
using ResultPtr = std::unique_ptr<sdcagg_result, ResultDeleter>;
using ReportPtr = std::unique_ptr<sdcagg_report, ReportDeleter>;

// Owns a string returned by the C API.
std::string Take(char* s) {
  std::string out = s ? s : "";
  sdcagg_string_free(s);
  return out;
}

SchemaPtr LoadSchema(const std::string& path) {
  sdcagg_schema* schema = nullptr;
  Check(sdcagg_schema_load(path.c_str(), &schema), "schema");
  return SchemaPtr(schema);
}

TablePtr LoadTable(const std::string& path, const sdcagg_schema* schema, bool encode, bool masked) {
  sdcagg_load_options options{encode ? 1 : 0, masked ? 1 : 0};
  sdcagg_table* table = nullptr;
  Check(sdcagg_table_load(path.c_str(), schema, &options, &table), "load");
  return TablePtr(table);
}

// masked.csv -> masked.<suffix>
std::string Sibling(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  p.replace_extension(suffix);
  return p.string();
}

std::string JsonString(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    out.push_back(ch);
  }
  return out + "\"";
}

struct AnonymizeArgs {
  std::string input, schema, method = "mdav", out;
  std::size_t k = 2;
  std::size_t groups_count = 0;
  std::size_t c_min = 0, c_max = 0;
  std::uint64_t seed = 0;
  double m_fuzz = 2.0, eta = 2.0, tol = 1e-6;
  int max_iter = 300;
  std::string normalize = "lenient";
  bool encode = false;
  bool json = false;
};

int RunAnonymize(const AnonymizeArgs& a) {
  auto schema = LoadSchema(a.schema);
  auto table = LoadTable(a.input, schema.get(), a.encode, false);

  sdcagg_anonymize_options options;
  sdcagg_anonymize_options_init(&options);
  options.method = a.method.c_str();
  options.k = a.k;
  options.groups_count = a.groups_count;
  options.c_min = a.c_min;
  options.c_max = a.c_max;
  options.m_fuzz = a.m_fuzz;
  options.eta = a.eta;
  options.tol = a.tol;
  options.max_iter = a.max_iter;
  options.seed = a.seed;
  options.normalize = a.normalize == "strict" ? SDCAGG_NORMALIZE_STRICT : SDCAGG_NORMALIZE_LENIENT;

  sdcagg_result* raw = nullptr;
  Check(sdcagg_anonymize(table.get(), &options, &raw), a.method);
  ResultPtr result(raw);
  sdcagg_table* masked_raw = nullptr;
  Check(sdcagg_result_masked(result.get(), &masked_raw), "masked output");
  TablePtr masked(masked_raw);
  std::size_t k_max = 0;
  Check(sdcagg_k_anonymity(masked.get(), &k_max), "k-anonymity");

  if (a.method == "hm_pfsom") {
    char* s = nullptr;
    Check(sdcagg_result_structure_json(result.get(), &s), "structure");
    Check(sdcagg_write_file(Sibling(a.out, ".structure.json").c_str(), (Take(s) + "\n").c_str()), "write");
  }
  if (a.encode) {
    char* s = nullptr;
    Check(sdcagg_table_codes_json(table.get(), &s), "codes");
    Check(sdcagg_write_file(Sibling(a.out, ".codes.json").c_str(), (Take(s) + "\n").c_str()), "write");
  }
  Check(sdcagg_table_save(masked.get(), a.out.c_str()), "write");

  const std::size_t n = sdcagg_table_rows(masked.get());
  if (a.json) {
    std::cout << "{\"n\":" << n << ",\"method\":" << JsonString(a.method) << ",\"k\":" << a.k
              << ",\"k_max\":" << k_max << "}\n";
  } else {
    std::cout << "n=" << n << " method=" << a.method << " k=" << a.k << " k_max=" << k_max << "\n";
  }
  return kExitOk;
}

struct EvaluateArgs {
  std::string original, masked, schema;
  std::size_t k = 0;
  bool encode = false;
  bool json = false;
};

int RunEvaluate(const EvaluateArgs& a) {
  auto schema = LoadSchema(a.schema);
  auto original = LoadTable(a.original, schema.get(), a.encode, false);
  auto masked = LoadTable(a.masked, schema.get(), a.encode, true);
  sdcagg_report* raw = nullptr;
  Check(sdcagg_evaluate(original.get(), masked.get(), a.k, &raw), "evaluate");
  ReportPtr report(raw);
  char* s = nullptr;
  if (a.json) {
    Check(sdcagg_report_json(report.get(), &s), "report");
    std::cout << Take(s) << "\n";
  } else {
    Check(sdcagg_report_text(report.get(), &s), "report");
    std::cout << Take(s);
  }
  return kExitOk;
}

int RunInspect(const std::string& input, const std::string& schema_path, bool encode) {
  auto schema = LoadSchema(schema_path);
  auto table = LoadTable(input, schema.get(), encode, false);
  char* s = nullptr;
  Check(sdcagg_table_inspect_json(table.get(), &s), "inspect");
  std::cout << Take(s) << "\n";
  return kExitOk;
}

void PrintProgress(const char* line, void*) { std::cerr << line << "\n"; }

int RunSweep(const std::string& spec) {
  char* written = nullptr;
  Check(sdcagg_sweep_run(spec.c_str(), PrintProgress, nullptr, &written), "sweep");
  std::cout << Take(written) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sdcagg: k-anonymous microaggregation and disclosure-risk evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sdcagg_version()));

  AnonymizeArgs an;
  auto* anonymize = app.add_subcommand("anonymize", "Mask the quasi-identifiers of a microdata file");
  anonymize->add_option("--input", an.input, "Input CSV")->required();
  anonymize->add_option("--schema", an.schema, "Schema JSON")->required();
  anonymize->add_option("--method", an.method, "Method")
      ->check(CLI::IsMember({"mdav", "individual_sorting", "single_axis_zscore", "single_axis_pca", "hm_pfsom"}));
  anonymize->add_option("--k", an.k, "Privacy parameter k")->check(CLI::PositiveNumber);
  anonymize->add_option("--groups-count", an.groups_count, "hm_pfsom: groups per sub-microdata instead of k");
  anonymize->add_option("--seed", an.seed, "Seed");
  anonymize->add_option("--out", an.out, "Masked CSV output path")->required();
  anonymize->add_option("--c-min", an.c_min, "hm_pfsom: minimum sub-microdata count");
  anonymize->add_option("--c-max", an.c_max, "hm_pfsom: maximum sub-microdata count");
  anonymize->add_option("--m-fuzz", an.m_fuzz, "Membership fuzzifier (> 1)");
  anonymize->add_option("--eta", an.eta, "Typicality fuzzifier (> 1)");
  anonymize->add_option("--tol", an.tol, "Center-movement tolerance");
  anonymize->add_option("--max-iter", an.max_iter, "Clustering iteration cap");
  anonymize->add_option("--normalize", an.normalize, "Constant-column handling")
      ->check(CLI::IsMember({"strict", "lenient"}));
  anonymize->add_flag("--encode-categorical", an.encode, "Factorize string columns to integer codes");
  anonymize->add_flag("--json", an.json, "Machine-readable summary on stdout");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Information loss and disclosure risk of a masked file");
  evaluate->add_option("--original,--input", ev.original, "Original CSV")->required();
  evaluate->add_option("--masked", ev.masked, "Masked CSV")->required();
  evaluate->add_option("--schema", ev.schema, "Schema JSON")->required();
  evaluate->add_option("--k", ev.k, "Report whether the masked file is k-anonymous");
  evaluate->add_flag("--encode-categorical", ev.encode, "Factorize string columns to integer codes");
  evaluate->add_flag("--json", ev.json, "JSON report on stdout");

  std::string spec;
  auto* sweep = app.add_subcommand("sweep", "Run a k-sweep described by a JSON spec file");
  sweep->add_option("spec,--spec", spec, "Sweep spec JSON")->required();

  std::string in_input, in_schema;
  bool in_encode = false;
  auto* inspect = app.add_subcommand("inspect", "Column statistics of a microdata file");
  inspect->add_option("--input", in_input, "Input CSV")->required();
  inspect->add_option("--schema", in_schema, "Schema JSON")->required();
  inspect->add_flag("--encode-categorical", in_encode, "Factorize string columns to integer codes");
  inspect->add_flag("--json", "Accepted for symmetry; output is always JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*anonymize) return RunAnonymize(an);
    if (*evaluate) return RunEvaluate(ev);
    if (*sweep) return RunSweep(spec);
    if (*inspect) return RunInspect(in_input, in_schema, in_encode);
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return kExitUsage;
}
