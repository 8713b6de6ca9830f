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

#ifndef SDCAGG_CORE_MICROAGG_HPP_
#define SDCAGG_CORE_MICROAGG_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dataset.hpp"
#include "fpclust.hpp"
#include "json.hpp"
#include "matrix.hpp"

namespace sdcagg {

// Disjoint, exhaustive grouping of records. Groups are numbered 0..g-1 and
// none is empty.
class Partition {
 public:
  Partition(std::vector<std::size_t> labels, std::size_t k_declared);

  const std::vector<std::size_t>& labels() const { return labels_; }
  std::size_t groups() const { return groups_; }
  std::size_t k_declared() const { return k_declared_; }
  std::size_t size() const { return labels_.size(); }

  // Row indices per group, ascending.
  std::vector<std::vector<std::size_t>> Members() const;
  std::size_t MinGroupSize() const;

 private:
  std::vector<std::size_t> labels_;
  std::size_t groups_ = 0;
  std::size_t k_declared_ = 0;
};

enum class Method {
  kMdav,
  kIndividualSorting,
  kSingleAxisZscore,
  kSingleAxisPca,
  kHmPfsom,
};

// mdav, individual_sorting, single_axis_zscore, single_axis_pca, hm_pfsom
std::string_view MethodName(Method method);
std::optional<Method> ParseMethod(std::string_view name);

struct AnonymizationConfig {
  Method method = Method::kMdav;
  std::size_t k = 2;
  // hm_pfsom only: fixes the number of groups per sub-microdata instead of
  // k; the effective k becomes floor(min_class_size / groups_count).
  std::optional<std::size_t> groups_count;
  FuzzinessParams fuzz;
  // hm_pfsom only: sub-microdata count range. Defaults to [2, ceil(sqrt(n))].
  // c_max = 1 keeps the whole table as one sub-microdata.
  std::optional<std::size_t> c_min;
  std::optional<std::size_t> c_max;
  NormalizeMode normalize = NormalizeMode::kLenient;
};

struct SubMicrodata {
  std::vector<std::size_t> members;        // row indices, ascending
  std::size_t cs = 1;                      // confidential class count
  std::vector<std::size_t> class_labels;   // per member, 0..cs-1
  std::vector<std::size_t> class_sizes;    // per class
  std::size_t k_effective = 0;
  std::size_t groups = 0;
  bool collapsed = false;  // too small for k * cs; kept as one group
};

struct AnonymizedResult {
  // Identifier columns are dropped; confidential columns are bit-identical
  // to the input.
  Microdata masked;
  // Absent for individual_sorting, which masks attribute by attribute.
  std::optional<Partition> partition;
  std::vector<SubMicrodata> subs;  // hm_pfsom only

  // {"labels":[...], "groups":[{"size":..,"class_counts":{..}}],
  //  "subs":[{"size":..,"cs":..,"class_sizes":[..]}]}
  nlohmann::json StructureJson() const;
};

// Maximum Distance to Average Vector. Squared Euclidean distances over the
// given matrix; ties go to the lowest row index. Group sizes in [k, 2k-1].
Partition MdavPartition(const Matrix& qids, std::size_t k);

// Sorts each quasi-identifier independently, averages consecutive runs of k
// values (the last run absorbs the remainder) and restores row order. Does
// not in general yield k-anonymity.
Microdata IndividualSortingMask(const Microdata& md, std::size_t k);

enum class AxisCriterion { kZscoreSum, kFirstPc };

// Sorts records by a scalar score and cuts consecutive runs of k. With
// `strict` false, zero-variance attributes score 0 instead of failing.
Partition SingleAxisPartition(const Matrix& qids, std::size_t k, AxisCriterion criterion,
                              bool strict = true);

// Replaces every quasi-identifier cell with its group mean.
Microdata CentroidReplace(const Microdata& md, const Partition& partition);

// Diversity-constrained fixed-size grouping. `qids` are the records of one
// sub-microdata in distance space, `class_labels` their confidential
// classes. Each seeded group takes the unassigned record farthest from the
// sub-microdata centroid, its k-1 nearest classmates and the k nearest
// records of every other class, so it holds k records of every class.
// Seeding stops as soon as a class has fewer than k records left; leftovers
// join the group with the nearest centroid.
Partition DiversityPartition(const Matrix& qids, std::span<const std::size_t> class_labels,
                             std::size_t k);

AnonymizedResult HmPfsomAnonymize(const Microdata& md, const AnonymizationConfig& config);

// Dispatches on config.method. Distances are computed on min-max scaled
// attributes; masked values are group means in original units.
AnonymizedResult Anonymize(const Microdata& md, const AnonymizationConfig& config);

}  // namespace sdcagg

#endif  // SDCAGG_CORE_MICROAGG_HPP_
