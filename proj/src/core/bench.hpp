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

// k-sweeps of anonymization methods over one dataset, with CSV/JSON output.

#ifndef SDCAGG_CORE_BENCH_HPP_
#define SDCAGG_CORE_BENCH_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "fpclust.hpp"
#include "json.hpp"
#include "microagg.hpp"

namespace sdcagg {

enum class ReportFormat { kCsv, kJson };

struct SweepSpec {
  std::string dataset;  // CSV path
  std::string schema;   // schema JSON path
  std::vector<Method> methods;
  std::vector<std::size_t> k_values;  // strictly increasing
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  ReportFormat format = ReportFormat::kCsv;
  bool long_format = false;  // additionally write one row per metric
  std::size_t workers = 1;
  bool encode_categorical = false;
  NormalizeMode normalize = NormalizeMode::kLenient;
  FuzzinessParams fuzz;

  // Relative paths resolve against `base_dir`. Throws ErrorKind::kSpec.
  static SweepSpec FromJson(const nlohmann::json& j, const std::string& base_dir = "");
  static SweepSpec FromFile(const std::string& path);
  void Validate() const;
};

struct SweepRow {
  Method method = Method::kMdav;
  std::size_t k = 0;
  std::optional<std::string> error;
  double il = 0.0;
  double il_normalized = 0.0;
  std::size_t linked = 0;
  std::size_t second_nearest = 0;
  double expected_matches = 0.0;
  double min_sse = 0.0;
  std::size_t k_max = 0;
  double wall_time_ms = 0.0;
  // hm_pfsom: sub-microdata count and confidential classes per sub
  std::optional<std::size_t> subs;
  std::vector<std::size_t> cs;
};

using ProgressFn = std::function<void(const SweepRow&)>;

// One row per (method, k), in spec order. Failures become row errors.
std::vector<SweepRow> RunSweep(const Microdata& data, const SweepSpec& spec, const ProgressFn& progress = {});
// Loads spec.dataset / spec.schema first; only load failures throw.
std::vector<SweepRow> RunSweep(const SweepSpec& spec, const ProgressFn& progress = {});

std::string SweepCsv(const std::vector<SweepRow>& rows);
std::string SweepLongCsv(const std::vector<SweepRow>& rows);
nlohmann::json SweepJson(const std::vector<SweepRow>& rows);

// Writes sweep_<stem>.<csv|json> (and sweep_<stem>.long.csv when asked)
// into `output_dir`; returns the written paths.
std::vector<std::string> EmitReport(const std::vector<SweepRow>& rows, const std::string& output_dir,
                                    const std::string& dataset_stem, ReportFormat format, bool long_format = false);

}  // namespace sdcagg

#endif  // SDCAGG_CORE_BENCH_HPP_
