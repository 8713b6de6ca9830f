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

#include "microagg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "error.hpp"

namespace sdcagg {
namespace {

std::vector<std::size_t> Iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

void RequireK(std::size_t k, std::size_t n) {
  if (k < 1) throw Error(ErrorKind::kInvalidArgument, "k must be >= 1");
  if (k > n) {
    throw Error(ErrorKind::kInvalidArgument,
                "k=" + std::to_string(k) + " exceeds the record count " + std::to_string(n));
  }
}

// Record in `pool` farthest from `point`; ties to the lowest index. `pool`
// must be ascending.
std::size_t Farthest(const Matrix& m, const std::vector<std::size_t>& pool, std::span<const double> point) {
  std::size_t best = pool.front();
  double best_d = -1.0;
  for (std::size_t r : pool) {
    const double d = SquaredDistance(m.row(r), point);
    if (d > best_d) {
      best_d = d;
      best = r;
    }
  }
  return best;
}

// The `count` records of `pool` nearest to `point`, ordered by (distance,
// index).
std::vector<std::size_t> Nearest(const Matrix& m, const std::vector<std::size_t>& pool,
                                 std::span<const double> point, std::size_t count) {
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(pool.size());
  for (std::size_t r : pool) scored.emplace_back(SquaredDistance(m.row(r), point), r);
  count = std::min(count, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(count), scored.end());
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(scored[i].second);
  return out;
}

void RemoveAll(std::vector<std::size_t>& pool, const std::vector<std::size_t>& gone) {
  std::vector<std::size_t> sorted = gone;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> kept;
  kept.reserve(pool.size());
  std::set_difference(pool.begin(), pool.end(), sorted.begin(), sorted.end(), std::back_inserter(kept));
  pool = std::move(kept);
}

// Splits `order` into consecutive runs of k, the last run absorbing the
// remainder, and returns per-position group ids.
std::vector<std::size_t> ChunkLabels(const std::vector<std::size_t>& order, std::size_t k) {
  const std::size_t n = order.size();
  const std::size_t groups = n / k;
  std::vector<std::size_t> labels(n);
  for (std::size_t pos = 0; pos < n; ++pos) labels[order[pos]] = std::min(pos / k, groups - 1);
  return labels;
}

std::vector<std::size_t> StableOrderByScore(const std::vector<double>& score) {
  auto order = Iota(score.size());
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  return order;
}

// Column-wise z-scores (population std). Zero-variance columns fail when
// strict and become all-zero otherwise.
Matrix ZScores(const Matrix& m, bool strict) {
  const auto stats = ComputeColumnStats(m);
  Matrix z(m.rows(), m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (!(stats.stddev[c] > 0.0)) {
      if (strict) {
        throw Error(ErrorKind::kData, "single-axis sorting: quasi-identifier column " + std::to_string(c) +
                                          " has zero variance");
      }
      continue;
    }
    for (std::size_t r = 0; r < m.rows(); ++r) z(r, c) = (m(r, c) - stats.mean[c]) / stats.stddev[c];
  }
  return z;
}

Matrix NormalizedProjection(const Microdata& md, Role role, NormalizeMode mode) {
  const Matrix raw = Project(md, role);
  return MinMaxNormalize(raw, ComputeColumnStats(raw), mode);
}

std::size_t CeilSqrt(std::size_t n) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (r * r < n) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= n) --r;
  return r;
}

}  // namespace

Partition::Partition(std::vector<std::size_t> labels, std::size_t k_declared)
    : labels_(std::move(labels)), k_declared_(k_declared) {
  if (labels_.empty()) throw Error(ErrorKind::kInvalidArgument, "partition: no records");
  groups_ = *std::max_element(labels_.begin(), labels_.end()) + 1;
  std::vector<std::size_t> sizes(groups_, 0);
  for (auto l : labels_) ++sizes[l];
  for (std::size_t g = 0; g < groups_; ++g) {
    if (sizes[g] == 0) throw Error(ErrorKind::kInvalidArgument, "partition: group " + std::to_string(g) + " is empty");
  }
}

std::vector<std::vector<std::size_t>> Partition::Members() const {
  std::vector<std::vector<std::size_t>> out(groups_);
  for (std::size_t i = 0; i < labels_.size(); ++i) out[labels_[i]].push_back(i);
  return out;
}

std::size_t Partition::MinGroupSize() const {
  std::vector<std::size_t> sizes(groups_, 0);
  for (auto l : labels_) ++sizes[l];
  return *std::min_element(sizes.begin(), sizes.end());
}

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kMdav:
      return "mdav";
    case Method::kIndividualSorting:
      return "individual_sorting";
    case Method::kSingleAxisZscore:
      return "single_axis_zscore";
    case Method::kSingleAxisPca:
      return "single_axis_pca";
    case Method::kHmPfsom:
      return "hm_pfsom";
  }
  return "unknown";
}

std::optional<Method> ParseMethod(std::string_view name) {
  for (Method m : {Method::kMdav, Method::kIndividualSorting, Method::kSingleAxisZscore, Method::kSingleAxisPca,
                   Method::kHmPfsom}) {
    if (MethodName(m) == name) return m;
  }
  return std::nullopt;
}

nlohmann::json AnonymizedResult::StructureJson() const {
  nlohmann::json j;
  if (!partition) return j;
  j["labels"] = partition->labels();
  j["k"] = partition->k_declared();

  // class id of every record, local to its sub-microdata
  std::vector<std::size_t> cls(partition->size(), 0);
  std::vector<std::size_t> sub_of(partition->size(), 0);
  for (std::size_t s = 0; s < subs.size(); ++s) {
    for (std::size_t i = 0; i < subs[s].members.size(); ++i) {
      cls[subs[s].members[i]] = subs[s].class_labels[i];
      sub_of[subs[s].members[i]] = s;
    }
  }
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& members : partition->Members()) {
    std::map<std::size_t, std::size_t> counts;
    for (auto r : members) ++counts[cls[r]];
    nlohmann::json cc = nlohmann::json::object();
    for (auto [c, count] : counts) cc[std::to_string(c)] = count;
    nlohmann::json g = {{"size", members.size()}, {"class_counts", cc}};
    if (!subs.empty()) g["sub"] = sub_of[members.front()];
    groups.push_back(std::move(g));
  }
  j["groups"] = std::move(groups);
  nlohmann::json sj = nlohmann::json::array();
  for (const auto& s : subs) {
    sj.push_back({{"size", s.members.size()},
                  {"cs", s.cs},
                  {"class_sizes", s.class_sizes},
                  {"k_effective", s.k_effective},
                  {"groups", s.groups},
                  {"collapsed", s.collapsed}});
  }
  j["subs"] = std::move(sj);
  return j;
}

Partition MdavPartition(const Matrix& qids, std::size_t k) {
  const std::size_t n = qids.rows();
  RequireK(k, n);
  std::vector<std::size_t> labels(n, 0);
  std::size_t next_group = 0;
  auto remaining = Iota(n);

  auto assign = [&](const std::vector<std::size_t>& group) {
    for (auto r : group) labels[r] = next_group;
    ++next_group;
    RemoveAll(remaining, group);
  };
  // seed plus its k-1 nearest unassigned records
  auto group_around = [&](std::size_t seed) {
    std::vector<std::size_t> others;
    others.reserve(remaining.size());
    for (auto r : remaining) {
      if (r != seed) others.push_back(r);
    }
    auto group = Nearest(qids, others, qids.row(seed), k - 1);
    group.insert(group.begin(), seed);
    return group;
  };

  while (remaining.size() >= 3 * k) {
    const auto centroid = MeanOfRows(qids, remaining);
    const std::size_t xr = Farthest(qids, remaining, centroid);
    assign(group_around(xr));
    const std::size_t xd = Farthest(qids, remaining, qids.row(xr));
    assign(group_around(xd));
  }
  if (remaining.size() >= 2 * k) {
    const auto centroid = MeanOfRows(qids, remaining);
    assign(group_around(Farthest(qids, remaining, centroid)));
  }
  if (!remaining.empty()) assign(std::vector<std::size_t>(remaining));
  return Partition(std::move(labels), k);
}

Microdata IndividualSortingMask(const Microdata& md, std::size_t k) {
  RequireK(k, md.n());
  Matrix out = md.rows();
  for (std::size_t c : md.schema().IndicesOf(Role::kQuasiIdentifier)) {
    const auto values = md.rows().column(c);
    const auto order = StableOrderByScore(values);
    const auto labels = ChunkLabels(order, k);
    const std::size_t groups = md.n() / k;
    std::vector<CompensatedSum> sums(groups);
    std::vector<std::size_t> sizes(groups, 0);
    for (std::size_t r = 0; r < md.n(); ++r) {
      sums[labels[r]].Add(values[r]);
      ++sizes[labels[r]];
    }
    for (std::size_t r = 0; r < md.n(); ++r) {
      out(r, c) = sums[labels[r]].value() / static_cast<double>(sizes[labels[r]]);
    }
  }
  return md.WithValues(std::move(out));
}

Partition SingleAxisPartition(const Matrix& qids, std::size_t k, AxisCriterion criterion, bool strict) {
  RequireK(k, qids.rows());
  const Matrix z = ZScores(qids, strict);
  std::vector<double> score(qids.rows(), 0.0);
  if (criterion == AxisCriterion::kZscoreSum) {
    for (std::size_t r = 0; r < z.rows(); ++r) {
      for (std::size_t c = 0; c < z.cols(); ++c) score[r] += z(r, c);
    }
  } else {
    const std::size_t p = z.cols();
    const double n = static_cast<double>(z.rows());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t r = 0; r < z.rows(); ++r) {
      for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b) {
          cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += z(r, a) * z(r, b) / n;
        }
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::kData, "single-axis sorting: eigen-decomposition failed");
    }
    const auto& evals = solver.eigenvalues();  // ascending
    const Eigen::Index last = evals.size() - 1;
    if (!(evals(last) > 0.0) || (last > 0 && evals(last) - evals(last - 1) <= 1e-10 * evals(last))) {
      throw Error(ErrorKind::kData, "single-axis sorting: covariance has no unique leading component");
    }
    Eigen::VectorXd axis = solver.eigenvectors().col(last);
    Eigen::Index big = 0;
    for (Eigen::Index i = 1; i < axis.size(); ++i) {
      if (std::abs(axis(i)) > std::abs(axis(big))) big = i;
    }
    if (axis(big) < 0) axis = -axis;
    for (std::size_t r = 0; r < z.rows(); ++r) {
      for (std::size_t c = 0; c < p; ++c) score[r] += z(r, c) * axis(static_cast<Eigen::Index>(c));
    }
  }
  return Partition(ChunkLabels(StableOrderByScore(score), k), k);
}

Microdata CentroidReplace(const Microdata& md, const Partition& partition) {
  if (partition.size() != md.n()) {
    throw Error(ErrorKind::kInvalidArgument, "centroid_replace: partition covers " +
                                                 std::to_string(partition.size()) + " records, table has " +
                                                 std::to_string(md.n()));
  }
  Matrix out = md.rows();
  const auto members = partition.Members();
  const auto qcols = md.schema().IndicesOf(Role::kQuasiIdentifier);
  for (const auto& group : members) {
    for (std::size_t c : qcols) {
      CompensatedSum s;
      for (auto r : group) s.Add(md(r, c));
      const double mean = s.value() / static_cast<double>(group.size());
      for (auto r : group) out(r, c) = mean;
    }
  }
  return md.WithValues(std::move(out));
}

Partition DiversityPartition(const Matrix& qids, std::span<const std::size_t> class_labels, std::size_t k) {
  const std::size_t n = qids.rows();
  if (class_labels.size() != n) {
    throw Error(ErrorKind::kInvalidArgument, "diversity_partition: class labels do not cover the records");
  }
  if (n == 0) throw Error(ErrorKind::kInvalidArgument, "diversity_partition: no records");
  if (k < 1) throw Error(ErrorKind::kInvalidArgument, "k must be >= 1");

  std::map<std::size_t, std::vector<std::size_t>> pools;  // class -> unassigned rows, ascending
  for (std::size_t r = 0; r < n; ++r) pools[class_labels[r]].push_back(r);
  std::size_t smallest = n;
  std::size_t smallest_class = 0;
  for (const auto& [cls, rows] : pools) {
    if (rows.size() < smallest) {
      smallest = rows.size();
      smallest_class = cls;
    }
  }
  if (smallest < k) {
    throw Error(ErrorKind::kMethod, "confidential class " + std::to_string(smallest_class) + " has " +
                                        std::to_string(smallest) + " records, fewer than k=" + std::to_string(k) +
                                        "; feasible k <= " + std::to_string(smallest));
  }

  const auto centroid = MeanOfRows(qids, Iota(n));
  // farthest-first order of every record from the fixed centroid
  std::vector<std::pair<double, std::size_t>> by_distance;
  for (std::size_t r = 0; r < n; ++r) by_distance.emplace_back(-SquaredDistance(qids.row(r), centroid), r);
  std::sort(by_distance.begin(), by_distance.end());

  constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> labels(n, kUnassigned);
  std::size_t groups = 0;
  std::size_t cursor = 0;
  auto every_class_has_k = [&] {
    return std::all_of(pools.begin(), pools.end(), [&](const auto& p) { return p.second.size() >= k; });
  };
  while (every_class_has_k()) {
    while (labels[by_distance[cursor].second] != kUnassigned) ++cursor;
    const std::size_t xr = by_distance[cursor].second;
    const std::size_t own = class_labels[xr];

    std::vector<std::size_t> group{xr};
    for (auto& [cls, pool] : pools) {
      std::vector<std::size_t> picked;
      if (cls == own) {
        std::vector<std::size_t> others;
        for (auto r : pool) {
          if (r != xr) others.push_back(r);
        }
        picked = Nearest(qids, others, qids.row(xr), k - 1);
        picked.push_back(xr);
      } else {
        picked = Nearest(qids, pool, qids.row(xr), k);
      }
      for (auto r : picked) {
        labels[r] = groups;
        if (r != xr) group.push_back(r);
      }
      RemoveAll(pool, picked);
    }
    ++groups;
  }

  std::vector<std::vector<std::size_t>> members(groups);
  for (std::size_t r = 0; r < n; ++r) {
    if (labels[r] != kUnassigned) members[labels[r]].push_back(r);
  }
  std::vector<std::vector<double>> centroids;
  for (const auto& g : members) centroids.push_back(MeanOfRows(qids, g));
  for (std::size_t r = 0; r < n; ++r) {
    if (labels[r] != kUnassigned) continue;
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < groups; ++g) {
      const double d = SquaredDistance(qids.row(r), centroids[g]);
      if (d < best_d) {
        best_d = d;
        best = g;
      }
    }
    labels[r] = best;
  }
  return Partition(std::move(labels), k);
}

AnonymizedResult HmPfsomAnonymize(const Microdata& md, const AnonymizationConfig& config) {
  const std::size_t n = md.n();
  const std::size_t k = config.k;
  if (k < 1) throw Error(ErrorKind::kInvalidArgument, "k must be >= 1");
  if (!config.groups_count && n < 2 * k) {
    throw Error(ErrorKind::kMethod, "hm_pfsom needs at least 2k records: n=" + std::to_string(n) +
                                        ", k=" + std::to_string(k) + "; feasible k <= " + std::to_string(n / 2));
  }
  if (config.groups_count && *config.groups_count < 1) {
    throw Error(ErrorKind::kInvalidArgument, "groups_count must be >= 1");
  }
  config.fuzz.Validate();

  const Matrix qids = NormalizedProjection(md, Role::kQuasiIdentifier, config.normalize);
  const Matrix conf = NormalizedProjection(md, Role::kConfidential, config.normalize);

  // 1. sub-microdata by quasi-identifiers
  const std::size_t c_max = std::min(config.c_max.value_or(std::max<std::size_t>(2, CeilSqrt(n))), n);
  const std::size_t c_min = std::min(config.c_min.value_or(2), c_max);
  std::vector<std::size_t> sub_labels(n, 0);
  Matrix sub_centers = Matrix::FromRows({MeanOfRows(qids, Iota(n))});
  if (c_max >= 2) {
    auto sel = SelectPartition(qids, std::max<std::size_t>(c_min, 2), c_max, config.fuzz);
    sub_labels = std::move(sel.labels);
    sub_centers = std::move(sel.model.centers);
  }
  std::vector<std::vector<std::size_t>> sub_rows(sub_centers.rows());
  for (std::size_t r = 0; r < n; ++r) sub_rows[sub_labels[r]].push_back(r);

  // Sub-microdata smaller than k cannot host a k-anonymous group; fold each
  // into the sub with the nearest center, smallest first.
  const std::size_t min_sub = config.groups_count ? 1 : k;
  for (;;) {
    std::size_t small = sub_rows.size();
    for (std::size_t s = 0; s < sub_rows.size(); ++s) {
      if (sub_rows[s].size() < min_sub && (small == sub_rows.size() || sub_rows[s].size() < sub_rows[small].size())) {
        small = s;
      }
    }
    if (small == sub_rows.size() || sub_rows.size() == 1) break;
    std::size_t target = small;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < sub_rows.size(); ++s) {
      if (s == small) continue;
      const double d = SquaredDistance(sub_centers.row(s), sub_centers.row(small));
      if (d < best) {
        best = d;
        target = s;
      }
    }
    auto& dst = sub_rows[target];
    dst.insert(dst.end(), sub_rows[small].begin(), sub_rows[small].end());
    std::sort(dst.begin(), dst.end());
    sub_rows.erase(sub_rows.begin() + static_cast<std::ptrdiff_t>(small));
    std::vector<std::size_t> keep;
    for (std::size_t s = 0; s < sub_centers.rows(); ++s) {
      if (s != small) keep.push_back(s);
    }
    sub_centers = sub_centers.SelectRows(keep);
  }

  AnonymizedResult result{md, std::nullopt, {}};
  std::vector<std::size_t> labels(n, 0);
  std::size_t offset = 0;
  for (std::size_t s = 0; s < sub_rows.size(); ++s) {
    SubMicrodata sub;
    sub.members = sub_rows[s];
    const std::size_t ns = sub.members.size();
    const Matrix sub_qids = qids.SelectRows(sub.members);
    const Matrix sub_conf = conf.SelectRows(sub.members);

    // 2. confidential classes inside the sub-microdata
    sub.class_labels = DiscoverClasses(sub_conf, std::min(CeilSqrt(ns), ns), config.fuzz);
    sub.cs = *std::max_element(sub.class_labels.begin(), sub.class_labels.end()) + 1;
    sub.class_sizes.assign(sub.cs, 0);
    for (auto c : sub.class_labels) ++sub.class_sizes[c];
    const std::size_t min_class = *std::min_element(sub.class_sizes.begin(), sub.class_sizes.end());

    sub.k_effective = config.groups_count ? min_class / *config.groups_count : k;
    if (sub.k_effective == 0) {
      throw Error(ErrorKind::kMethod, "sub-microdata " + std::to_string(s) + ": smallest confidential class has " +
                                          std::to_string(min_class) + " records, fewer than groups_count=" +
                                          std::to_string(*config.groups_count));
    }

    // 3. diversity-constrained grouping
    std::vector<std::size_t> local;
    if (ns < sub.k_effective * sub.cs) {
      sub.collapsed = true;
      local.assign(ns, 0);
    } else {
      try {
        local = DiversityPartition(sub_qids, sub.class_labels, sub.k_effective).labels();
      } catch (const Error& e) {
        throw Error(e.kind(), "sub-microdata " + std::to_string(s) + " (" + std::to_string(ns) +
                                  " records): " + e.what());
      }
    }
    sub.groups = *std::max_element(local.begin(), local.end()) + 1;
    for (std::size_t i = 0; i < ns; ++i) labels[sub.members[i]] = offset + local[i];
    offset += sub.groups;
    result.subs.push_back(std::move(sub));
  }

  // 4-5. mean replacement over the union
  Partition partition(std::move(labels), k);
  result.masked = CentroidReplace(md, partition).WithoutIdentifiers();
  result.partition = std::move(partition);
  return result;
}

AnonymizedResult Anonymize(const Microdata& md, const AnonymizationConfig& config) {
  const bool strict = config.normalize == NormalizeMode::kStrict;
  switch (config.method) {
    case Method::kHmPfsom:
      return HmPfsomAnonymize(md, config);
    case Method::kIndividualSorting:
      return {IndividualSortingMask(md, config.k).WithoutIdentifiers(), std::nullopt, {}};
    case Method::kMdav:
    case Method::kSingleAxisZscore:
    case Method::kSingleAxisPca: {
      RequireK(config.k, md.n());
      std::optional<Partition> p;
      if (config.method == Method::kMdav) {
        p = MdavPartition(NormalizedProjection(md, Role::kQuasiIdentifier, config.normalize), config.k);
      } else {
        const auto criterion =
            config.method == Method::kSingleAxisZscore ? AxisCriterion::kZscoreSum : AxisCriterion::kFirstPc;
        p = SingleAxisPartition(Project(md, Role::kQuasiIdentifier), config.k, criterion, strict);
      }
      return {CentroidReplace(md, *p).WithoutIdentifiers(), std::move(p), {}};
    }
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown method");
}

}  // namespace sdcagg
