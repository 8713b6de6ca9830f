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

// Utility and disclosure-risk measures for an (original, masked) pair.

#ifndef SDCAGG_CORE_METRICS_HPP_
#define SDCAGG_CORE_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "json.hpp"
#include "microagg.hpp"

namespace sdcagg {

struct InformationLoss {
  double il = 0.0;             // sum over records
  double il_normalized = 0.0;  // 100 * il / n
};

// IL = sum_i (1/q) sum_j |x_ij - x'_ij| / (sqrt(2) S_j) over the q
// quasi-identifiers, S_j the population std of the original column.
InformationLoss ComputeInformationLoss(const Microdata& original, const Microdata& masked);

struct DbrlResult {
  std::size_t linked = 0;
  std::size_t second_nearest = 0;
  std::size_t not_linked = 0;
  // Tie-shared estimate: sum_i [i in argmin] / |argmin|.
  double expected_matches = 0.0;
};

// Distance-based record linkage. Each masked record is compared with every
// original record on the `role` attributes, min-max scaled with the original
// table's statistics. A record counts as linked only when its own original
// is the unique nearest, and as second nearest only when exactly one other
// original is strictly closer and none ties with its own.
DbrlResult Dbrl(const Microdata& original, const Microdata& masked, Role role = Role::kQuasiIdentifier);

struct GroupSse {
  std::vector<double> sse_per_group;
  double min_sse = 0.0;
};

// Per group: sum of squared distances between members and the group
// centroid on the `role` attributes. Raw units unless `normalized`.
GroupSse ComputeGroupSse(const Microdata& md, const Partition& partition, Role role = Role::kConfidential,
                         bool normalized = false);

struct KAnonymity {
  bool holds = false;
  std::size_t k_max = 0;  // smallest equivalence class
};

// Equivalence classes are rows with bit-identical quasi-identifier tuples.
KAnonymity CheckKAnonymity(const Microdata& masked, std::size_t k);
Partition EquivalenceClasses(const Microdata& masked);

// True iff every group holds at least one record of every class present in
// its scope. `scope` assigns records to scopes (sub-microdata); empty means
// one scope for the whole table. A group straddling scopes is an error.
bool CheckDiversity(const Partition& partition, std::span<const std::size_t> class_labels,
                    std::span<const std::size_t> scope = {});

// Confidential classes for evaluation when the caller has none: exact
// confidential tuples when there are at most ceil(sqrt(n)) of them,
// otherwise the PCAES-selected fuzzy clustering of the scaled attributes.
std::vector<std::size_t> DeriveConfidentialClasses(const Microdata& original);

struct EvaluationReport {
  std::size_t n = 0;
  double il = 0.0;
  double il_normalized = 0.0;
  DbrlResult dbrl;
  std::vector<double> sse_per_group;
  double min_sse = 0.0;
  std::size_t k_anonymous_at = 0;
  bool diversity_ok = false;
  std::optional<std::size_t> k;  // requested k, if any
  std::optional<bool> k_holds;

  nlohmann::json ToJson() const;
  std::string ToTable() const;
};

struct EvaluationInputs {
  std::optional<std::size_t> k;
  // Defaults to the masked table's equivalence classes.
  const Partition* partition = nullptr;
  // Defaults to DeriveConfidentialClasses(original) with one scope.
  std::span<const std::size_t> class_labels;
  std::span<const std::size_t> scope;
};

EvaluationReport Evaluate(const Microdata& original, const Microdata& masked, const EvaluationInputs& inputs = {});

}  // namespace sdcagg

#endif  // SDCAGG_CORE_METRICS_HPP_
