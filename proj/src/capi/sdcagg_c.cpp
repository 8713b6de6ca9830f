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

#include "sdcagg/sdcagg.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "core/bench.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/metrics.hpp"
#include "core/microagg.hpp"

struct sdcagg_schema {
  sdcagg::AttributeSchema schema;
};

struct sdcagg_table {
  sdcagg::Microdata data;
  sdcagg::CategoryCodes codes;
};

struct sdcagg_result {
  sdcagg::AnonymizedResult result;
};

struct sdcagg_report {
  sdcagg::EvaluationReport report;
};

namespace {

thread_local std::string g_last_error;

sdcagg_status StatusOf(sdcagg::ErrorKind kind) {
  switch (kind) {
    case sdcagg::ErrorKind::kInvalidArgument:
      return SDCAGG_ERR_INVALID_ARGUMENT;
    case sdcagg::ErrorKind::kIo:
      return SDCAGG_ERR_IO;
    case sdcagg::ErrorKind::kData:
      return SDCAGG_ERR_DATA;
    case sdcagg::ErrorKind::kMethod:
      return SDCAGG_ERR_METHOD;
    case sdcagg::ErrorKind::kSpec:
      return SDCAGG_ERR_SPEC;
  }
  return SDCAGG_ERR_INTERNAL;
}

template <typename Fn>
sdcagg_status Guard(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return SDCAGG_OK;
  } catch (const sdcagg::Error& e) {
    g_last_error = e.what();
    return StatusOf(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return SDCAGG_ERR_INTERNAL;
}

void Require(bool ok, const char* what) {
  if (!ok) throw sdcagg::Error(sdcagg::ErrorKind::kInvalidArgument, what);
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

sdcagg::LoadOptions ToLoadOptions(const sdcagg_load_options* options) {
  sdcagg::LoadOptions o;
  if (options) {
    o.encode_categorical = options->encode_categorical != 0;
    o.allow_missing_identifiers = options->allow_missing_identifiers != 0;
  }
  return o;
}

}  // namespace

extern "C" {

const char* sdcagg_version(void) { return "0.1.0"; }

const char* sdcagg_last_error(void) { return g_last_error.c_str(); }

void sdcagg_string_free(char* s) { std::free(s); }

sdcagg_status sdcagg_schema_load(const char* path, sdcagg_schema** out) {
  return Guard([&] {
    Require(path && out, "sdcagg_schema_load: null argument");
    *out = new sdcagg_schema{sdcagg::AttributeSchema::FromJsonFile(path)};
  });
}

sdcagg_status sdcagg_schema_parse(const char* json, sdcagg_schema** out) {
  return Guard([&] {
    Require(json && out, "sdcagg_schema_parse: null argument");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
      throw sdcagg::Error(sdcagg::ErrorKind::kData, std::string("schema: ") + e.what());
    }
    *out = new sdcagg_schema{sdcagg::AttributeSchema::FromJson(j)};
  });
}

void sdcagg_schema_free(sdcagg_schema* schema) { delete schema; }

sdcagg_status sdcagg_table_load(const char* path, const sdcagg_schema* schema, const sdcagg_load_options* options,
                                sdcagg_table** out) {
  return Guard([&] {
    Require(path && schema && out, "sdcagg_table_load: null argument");
    sdcagg::CategoryCodes codes;
    auto md = sdcagg::LoadTable(path, schema->schema, ToLoadOptions(options), &codes);
    *out = new sdcagg_table{std::move(md), std::move(codes)};
  });
}

sdcagg_status sdcagg_table_parse(const char* csv, const sdcagg_schema* schema, const sdcagg_load_options* options,
                                 sdcagg_table** out) {
  return Guard([&] {
    Require(csv && schema && out, "sdcagg_table_parse: null argument");
    sdcagg::CategoryCodes codes;
    auto md = sdcagg::ParseCsv(csv, schema->schema, ToLoadOptions(options), &codes);
    *out = new sdcagg_table{std::move(md), std::move(codes)};
  });
}

sdcagg_status sdcagg_table_save(const sdcagg_table* table, const char* path) {
  return Guard([&] {
    Require(table && path, "sdcagg_table_save: null argument");
    sdcagg::SaveTable(table->data, path);
  });
}

sdcagg_status sdcagg_table_to_csv(const sdcagg_table* table, char** out) {
  return Guard([&] {
    Require(table && out, "sdcagg_table_to_csv: null argument");
    *out = Dup(sdcagg::ToCsv(table->data));
  });
}

size_t sdcagg_table_rows(const sdcagg_table* table) { return table ? table->data.n() : 0; }

size_t sdcagg_table_cols(const sdcagg_table* table) { return table ? table->data.m() : 0; }

sdcagg_status sdcagg_table_values(const sdcagg_table* table, double* out, size_t capacity) {
  return Guard([&] {
    Require(table && out, "sdcagg_table_values: null argument");
    const auto& values = table->data.rows().data();
    Require(capacity >= values.size(), "sdcagg_table_values: buffer too small");
    std::memcpy(out, values.data(), values.size() * sizeof(double));
  });
}

sdcagg_status sdcagg_table_codes_json(const sdcagg_table* table, char** out) {
  return Guard([&] {
    Require(table && out, "sdcagg_table_codes_json: null argument");
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, labels] : table->codes) j[name] = labels;
    *out = Dup(j.dump(2));
  });
}

sdcagg_status sdcagg_table_inspect_json(const sdcagg_table* table, char** out) {
  return Guard([&] {
    Require(table && out, "sdcagg_table_inspect_json: null argument");
    const auto stats = sdcagg::ComputeColumnStats(table->data);
    nlohmann::json cols = nlohmann::json::array();
    const auto& attrs = table->data.schema().attributes();
    for (std::size_t c = 0; c < attrs.size(); ++c) {
      cols.push_back({{"name", attrs[c].name},
                      {"role", std::string(sdcagg::RoleName(attrs[c].role))},
                      {"min", stats.min[c]},
                      {"max", stats.max[c]},
                      {"mean", stats.mean[c]},
                      {"std", stats.stddev[c]}});
    }
    *out = Dup(nlohmann::json{{"n", table->data.n()}, {"columns", cols}}.dump(2));
  });
}

void sdcagg_table_free(sdcagg_table* table) { delete table; }

void sdcagg_anonymize_options_init(sdcagg_anonymize_options* options) {
  if (!options) return;
  const sdcagg::FuzzinessParams defaults;
  options->method = "mdav";
  options->k = 2;
  options->groups_count = 0;
  options->c_min = 0;
  options->c_max = 0;
  options->m_fuzz = defaults.m_fuzz;
  options->eta = defaults.eta;
  options->tol = defaults.tol;
  options->max_iter = defaults.max_iter;
  options->seed = 0;
  options->normalize = SDCAGG_NORMALIZE_LENIENT;
}

sdcagg_status sdcagg_anonymize(const sdcagg_table* table, const sdcagg_anonymize_options* options,
                               sdcagg_result** out) {
  return Guard([&] {
    Require(table && options && out && options->method, "sdcagg_anonymize: null argument");
    const auto method = sdcagg::ParseMethod(options->method);
    if (!method) {
      throw sdcagg::Error(sdcagg::ErrorKind::kInvalidArgument,
                          std::string("unknown method '") + options->method + "'");
    }
    sdcagg::AnonymizationConfig config;
    config.method = *method;
    config.k = options->k;
    if (options->groups_count) config.groups_count = options->groups_count;
    if (options->c_min) config.c_min = options->c_min;
    if (options->c_max) config.c_max = options->c_max;
    config.fuzz.m_fuzz = options->m_fuzz;
    config.fuzz.eta = options->eta;
    config.fuzz.tol = options->tol;
    config.fuzz.max_iter = options->max_iter;
    config.fuzz.seed = options->seed;
    config.normalize = options->normalize == SDCAGG_NORMALIZE_STRICT ? sdcagg::NormalizeMode::kStrict
                                                                     : sdcagg::NormalizeMode::kLenient;
    *out = new sdcagg_result{sdcagg::Anonymize(table->data, config)};
  });
}

sdcagg_status sdcagg_result_masked(const sdcagg_result* result, sdcagg_table** out) {
  return Guard([&] {
    Require(result && out, "sdcagg_result_masked: null argument");
    *out = new sdcagg_table{result->result.masked, {}};
  });
}

sdcagg_status sdcagg_result_structure_json(const sdcagg_result* result, char** out) {
  return Guard([&] {
    Require(result && out, "sdcagg_result_structure_json: null argument");
    auto j = result->result.StructureJson();
    if (j.is_null()) j = nlohmann::json::object();
    *out = Dup(j.dump());
  });
}

size_t sdcagg_result_groups(const sdcagg_result* result) {
  return result && result->result.partition ? result->result.partition->groups() : 0;
}

sdcagg_status sdcagg_result_labels(const sdcagg_result* result, size_t* out, size_t capacity) {
  return Guard([&] {
    Require(result && out, "sdcagg_result_labels: null argument");
    Require(result->result.partition.has_value(), "sdcagg_result_labels: method produced no partition");
    const auto& labels = result->result.partition->labels();
    Require(capacity >= labels.size(), "sdcagg_result_labels: buffer too small");
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i];
  });
}

void sdcagg_result_free(sdcagg_result* result) { delete result; }

sdcagg_status sdcagg_evaluate(const sdcagg_table* original, const sdcagg_table* masked, size_t k,
                              sdcagg_report** out) {
  return Guard([&] {
    Require(original && masked && out, "sdcagg_evaluate: null argument");
    sdcagg::EvaluationInputs inputs;
    if (k > 0) inputs.k = k;
    *out = new sdcagg_report{sdcagg::Evaluate(original->data, masked->data, inputs)};
  });
}

sdcagg_status sdcagg_report_json(const sdcagg_report* report, char** out) {
  return Guard([&] {
    Require(report && out, "sdcagg_report_json: null argument");
    *out = Dup(report->report.ToJson().dump());
  });
}

sdcagg_status sdcagg_report_text(const sdcagg_report* report, char** out) {
  return Guard([&] {
    Require(report && out, "sdcagg_report_text: null argument");
    *out = Dup(report->report.ToTable());
  });
}

double sdcagg_report_il(const sdcagg_report* report) { return report ? report->report.il : 0.0; }

size_t sdcagg_report_linked(const sdcagg_report* report) { return report ? report->report.dbrl.linked : 0; }

size_t sdcagg_report_k_anonymous_at(const sdcagg_report* report) {
  return report ? report->report.k_anonymous_at : 0;
}

void sdcagg_report_free(sdcagg_report* report) { delete report; }

sdcagg_status sdcagg_k_anonymity(const sdcagg_table* masked, size_t* k_max) {
  return Guard([&] {
    Require(masked && k_max, "sdcagg_k_anonymity: null argument");
    *k_max = sdcagg::CheckKAnonymity(masked->data, 1).k_max;
  });
}

sdcagg_status sdcagg_sweep_run(const char* spec_path, sdcagg_progress_fn progress, void* user, char** written_json) {
  return Guard([&] {
    Require(spec_path != nullptr, "sdcagg_sweep_run: null spec path");
    const auto spec = sdcagg::SweepSpec::FromFile(spec_path);
    sdcagg::ProgressFn report;
    if (progress) {
      report = [&](const sdcagg::SweepRow& row) {
        std::string line = std::string(sdcagg::MethodName(row.method)) + " k=" + std::to_string(row.k) + ": ";
        line += row.error ? "error: " + *row.error : "il=" + sdcagg::FormatDouble(row.il) +
                                                        " linked=" + std::to_string(row.linked) +
                                                        " k_max=" + std::to_string(row.k_max);
        progress(line.c_str(), user);
      };
    }
    const auto rows = sdcagg::RunSweep(spec, report);
    const auto stem = std::filesystem::path(spec.dataset).stem().string();
    const auto paths = sdcagg::EmitReport(rows, spec.output_dir, stem, spec.format, spec.long_format);
    if (written_json) *written_json = Dup(nlohmann::json(paths).dump());
  });
}

sdcagg_status sdcagg_write_file(const char* path, const char* content) {
  return Guard([&] {
    Require(path && content, "sdcagg_write_file: null argument");
    sdcagg::WriteFileAtomic(path, content);
  });
}

}  // extern "C"
