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

#include "bench.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <thread>

#include "error.hpp"
#include "metrics.hpp"

namespace sdcagg {
namespace {

namespace fs = std::filesystem;

std::string Resolve(const std::string& path, const std::string& base) {
  if (path.empty() || base.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).string();
}

SweepRow RunCell(const Microdata& data, const SweepSpec& spec, Method method, std::size_t k) {
  SweepRow row;
  row.method = method;
  row.k = k;
  const auto start = std::chrono::steady_clock::now();
  try {
    AnonymizationConfig config;
    config.method = method;
    config.k = k;
    config.fuzz = spec.fuzz;
    config.fuzz.seed = spec.seed;
    config.normalize = spec.normalize;
    const auto result = Anonymize(data, config);
    const auto il = ComputeInformationLoss(data, result.masked);
    const auto dbrl = Dbrl(data, result.masked);
    const Partition groups = result.partition ? *result.partition : EquivalenceClasses(result.masked);
    row.il = il.il;
    row.il_normalized = il.il_normalized;
    row.linked = dbrl.linked;
    row.second_nearest = dbrl.second_nearest;
    row.expected_matches = dbrl.expected_matches;
    row.min_sse = ComputeGroupSse(data, groups, Role::kConfidential).min_sse;
    row.k_max = CheckKAnonymity(result.masked, 1).k_max;
    if (method == Method::kHmPfsom) {
      row.subs = result.subs.size();
      for (const auto& s : result.subs) row.cs.push_back(s.cs);
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  row.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::string JoinCs(const std::vector<std::size_t>& cs) {
  std::string out;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i) out.push_back(';');
    out += std::to_string(cs[i]);
  }
  return out;
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  return out + "\"";
}

}  // namespace

SweepSpec SweepSpec::FromJson(const nlohmann::json& j, const std::string& base_dir) {
  SweepSpec spec;
  try {
    if (!j.is_object()) throw Error(ErrorKind::kSpec, "sweep spec must be a JSON object");
    for (const char* key : {"dataset", "schema", "methods", "k_values"}) {
      if (!j.contains(key)) throw Error(ErrorKind::kSpec, std::string("sweep spec: missing \"") + key + "\"");
    }
    spec.dataset = Resolve(j.at("dataset").get<std::string>(), base_dir);
    spec.schema = Resolve(j.at("schema").get<std::string>(), base_dir);
    for (const auto& m : j.at("methods")) {
      const auto name = m.get<std::string>();
      const auto method = ParseMethod(name);
      if (!method) throw Error(ErrorKind::kSpec, "sweep spec: unknown method '" + name + "'");
      spec.methods.push_back(*method);
    }
    for (const auto& k : j.at("k_values")) {
      if (!k.is_number_integer() || k.get<long long>() < 1) {
        throw Error(ErrorKind::kSpec, "sweep spec: k_values must be positive integers");
      }
      spec.k_values.push_back(k.get<std::size_t>());
    }
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.output_dir = Resolve(j.value("output_dir", std::string(".")), base_dir);
    const auto format = j.value("format", std::string("csv"));
    if (format == "csv") {
      spec.format = ReportFormat::kCsv;
    } else if (format == "json") {
      spec.format = ReportFormat::kJson;
    } else {
      throw Error(ErrorKind::kSpec, "sweep spec: format must be \"csv\" or \"json\"");
    }
    spec.long_format = j.value("long_format", false);
    spec.workers = j.value("workers", std::size_t{1});
    spec.encode_categorical = j.value("encode_categorical", false);
    const auto normalize = j.value("normalize", std::string("lenient"));
    if (normalize == "strict") {
      spec.normalize = NormalizeMode::kStrict;
    } else if (normalize == "lenient") {
      spec.normalize = NormalizeMode::kLenient;
    } else {
      throw Error(ErrorKind::kSpec, "sweep spec: normalize must be \"strict\" or \"lenient\"");
    }
    if (j.contains("fuzz")) {
      const auto& f = j.at("fuzz");
      spec.fuzz.m_fuzz = f.value("m_fuzz", spec.fuzz.m_fuzz);
      spec.fuzz.eta = f.value("eta", spec.fuzz.eta);
      spec.fuzz.tol = f.value("tol", spec.fuzz.tol);
      spec.fuzz.max_iter = f.value("max_iter", spec.fuzz.max_iter);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kSpec, std::string("sweep spec: ") + e.what());
  }
  spec.Validate();
  return spec;
}

SweepSpec SweepSpec::FromFile(const std::string& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::kSpec, e.what());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kSpec, "sweep spec " + path + ": " + e.what());
  }
  return FromJson(j, fs::path(path).parent_path().string());
}

void SweepSpec::Validate() const {
  if (methods.empty()) throw Error(ErrorKind::kSpec, "sweep spec: methods must not be empty");
  if (k_values.empty()) throw Error(ErrorKind::kSpec, "sweep spec: k_values must not be empty");
  for (std::size_t i = 1; i < k_values.size(); ++i) {
    if (k_values[i] <= k_values[i - 1]) throw Error(ErrorKind::kSpec, "sweep spec: k_values must be strictly increasing");
  }
  if (workers < 1) throw Error(ErrorKind::kSpec, "sweep spec: workers must be >= 1");
  try {
    fuzz.Validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kSpec, std::string("sweep spec: ") + e.what());
  }
}

std::vector<SweepRow> RunSweep(const Microdata& data, const SweepSpec& spec, const ProgressFn& progress) {
  spec.Validate();
  std::vector<std::pair<Method, std::size_t>> jobs;
  for (auto m : spec.methods) {
    for (auto k : spec.k_values) jobs.emplace_back(m, k);
  }
  std::vector<SweepRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      rows[i] = RunCell(data, spec, jobs[i].first, jobs[i].second);
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mu);
        progress(rows[i]);
      }
    }
  };
  const std::size_t nthreads = std::min(spec.workers, jobs.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::vector<SweepRow> RunSweep(const SweepSpec& spec, const ProgressFn& progress) {
  const auto schema = AttributeSchema::FromJsonFile(spec.schema);
  LoadOptions options;
  options.encode_categorical = spec.encode_categorical;
  const auto data = LoadTable(spec.dataset, schema, options);
  return RunSweep(data, spec, progress);
}

std::string SweepCsv(const std::vector<SweepRow>& rows) {
  std::string out =
      "method,k,il,il_normalized,linked,second_nearest,expected_matches,min_sse,k_max,wall_time_ms,subs,cs,error\n";
  for (const auto& r : rows) {
    out += std::string(MethodName(r.method)) + "," + std::to_string(r.k) + ",";
    if (r.error) {
      out += ",,,,,,," + FormatDouble(r.wall_time_ms) + ",,," + CsvField(*r.error) + "\n";
      continue;
    }
    out += FormatDouble(r.il) + "," + FormatDouble(r.il_normalized) + "," + std::to_string(r.linked) + "," +
           std::to_string(r.second_nearest) + "," + FormatDouble(r.expected_matches) + "," +
           FormatDouble(r.min_sse) + "," + std::to_string(r.k_max) + "," + FormatDouble(r.wall_time_ms) + ",";
    out += (r.subs ? std::to_string(*r.subs) : std::string()) + "," + JoinCs(r.cs) + ",\n";
  }
  return out;
}

std::string SweepLongCsv(const std::vector<SweepRow>& rows) {
  std::string out = "method,k,metric,value\n";
  for (const auto& r : rows) {
    if (r.error) continue;
    const std::string prefix = std::string(MethodName(r.method)) + "," + std::to_string(r.k) + ",";
    const std::pair<const char*, std::string> metrics[] = {
        {"il", FormatDouble(r.il)},
        {"il_normalized", FormatDouble(r.il_normalized)},
        {"linked", std::to_string(r.linked)},
        {"second_nearest", std::to_string(r.second_nearest)},
        {"expected_matches", FormatDouble(r.expected_matches)},
        {"min_sse", FormatDouble(r.min_sse)},
        {"k_max", std::to_string(r.k_max)},
        {"wall_time_ms", FormatDouble(r.wall_time_ms)},
    };
    for (const auto& [name, value] : metrics) out += prefix + name + "," + value + "\n";
  }
  return out;
}

nlohmann::json SweepJson(const std::vector<SweepRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json o = {{"method", std::string(MethodName(r.method))}, {"k", r.k}};
    if (r.error) {
      o["error"] = *r.error;
      o["wall_time_ms"] = r.wall_time_ms;
      arr.push_back(std::move(o));
      continue;
    }
    o["il"] = r.il;
    o["il_normalized"] = r.il_normalized;
    o["linked"] = r.linked;
    o["second_nearest"] = r.second_nearest;
    o["expected_matches"] = r.expected_matches;
    o["min_sse"] = r.min_sse;
    o["k_max"] = r.k_max;
    o["wall_time_ms"] = r.wall_time_ms;
    if (r.subs) o["sub_structure"] = {{"c", *r.subs}, {"cs", r.cs}};
    arr.push_back(std::move(o));
  }
  return arr;
}

std::vector<std::string> EmitReport(const std::vector<SweepRow>& rows, const std::string& output_dir,
                                    const std::string& dataset_stem, ReportFormat format, bool long_format) {
  if (rows.empty()) throw Error(ErrorKind::kInvalidArgument, "emit_report: no results");
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (!fs::is_directory(output_dir)) throw Error(ErrorKind::kIo, "output directory '" + output_dir + "' is not usable");
  std::vector<std::string> written;
  const fs::path base = fs::path(output_dir) / ("sweep_" + dataset_stem);
  if (format == ReportFormat::kCsv) {
    const std::string path = base.string() + ".csv";
    WriteFileAtomic(path, SweepCsv(rows));
    written.push_back(path);
  } else {
    const std::string path = base.string() + ".json";
    WriteFileAtomic(path, SweepJson(rows).dump(2) + "\n");
    written.push_back(path);
  }
  if (long_format) {
    const std::string path = base.string() + ".long.csv";
    WriteFileAtomic(path, SweepLongCsv(rows));
    written.push_back(path);
  }
  return written;
}

}  // namespace sdcagg
