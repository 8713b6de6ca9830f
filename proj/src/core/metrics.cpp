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

#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "error.hpp"
#include "fpclust.hpp"

namespace sdcagg {
namespace {

std::vector<std::string> NamesOf(const AttributeSchema& schema, Role role) {
  std::vector<std::string> out;
  for (const auto& a : schema.attributes()) {
    if (a.role == role) out.push_back(a.name);
  }
  return out;
}

// Projections of both tables onto `role`, checked for matching shape.
std::pair<Matrix, Matrix> Aligned(const Microdata& original, const Microdata& masked, Role role) {
  if (original.n() != masked.n()) {
    throw Error(ErrorKind::kData, "original has " + std::to_string(original.n()) + " records, masked has " +
                                      std::to_string(masked.n()));
  }
  if (NamesOf(original.schema(), role) != NamesOf(masked.schema(), role)) {
    throw Error(ErrorKind::kData, std::string("original and masked disagree on ") + std::string(RoleName(role)) +
                                      " attributes");
  }
  return {Project(original, role), Project(masked, role)};
}

std::vector<std::uint64_t> RowBits(std::span<const double> row) {
  std::vector<std::uint64_t> bits(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) std::memcpy(&bits[i], &row[i], sizeof(double));
  return bits;
}

std::size_t CeilSqrt(std::size_t n) {
  std::size_t r = 0;
  while (r * r < n) ++r;
  return r;
}

}  // namespace

InformationLoss ComputeInformationLoss(const Microdata& original, const Microdata& masked) {
  const auto [x, xm] = Aligned(original, masked, Role::kQuasiIdentifier);
  const auto stats = ComputeColumnStats(x);
  const std::size_t q = x.cols();
  for (std::size_t j = 0; j < q; ++j) {
    if (!(stats.stddev[j] > 0.0)) {
      throw Error(ErrorKind::kData, "information loss: quasi-identifier " +
                                        NamesOf(original.schema(), Role::kQuasiIdentifier)[j] +
                                        " has zero variance in the original");
    }
  }
  CompensatedSum total;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double rec = 0.0;
    for (std::size_t j = 0; j < q; ++j) rec += std::abs(x(i, j) - xm(i, j)) / (std::sqrt(2.0) * stats.stddev[j]);
    total.Add(rec / static_cast<double>(q));
  }
  InformationLoss out;
  out.il = total.value();
  out.il_normalized = 100.0 * out.il / static_cast<double>(x.rows());
  return out;
}

DbrlResult Dbrl(const Microdata& original, const Microdata& masked, Role role) {
  const auto [x_raw, xm_raw] = Aligned(original, masked, role);
  const auto stats = ComputeColumnStats(x_raw);
  const Matrix x = MinMaxNormalize(x_raw, stats, NormalizeMode::kLenient);
  const Matrix xm = MinMaxNormalize(xm_raw, stats, NormalizeMode::kLenient);
  const std::size_t n = x.rows();
  DbrlResult out;
  CompensatedSum expected;
  for (std::size_t i = 0; i < n; ++i) {
    const double own = SquaredDistance(xm.row(i), x.row(i));
    std::size_t closer = 0;
    std::size_t tied = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = SquaredDistance(xm.row(i), x.row(j));
      if (d < own) {
        ++closer;
      } else if (d == own) {
        ++tied;
      }
    }
    if (closer == 0) expected.Add(1.0 / static_cast<double>(tied + 1));
    if (closer == 0 && tied == 0) {
      ++out.linked;
    } else if (closer == 1 && tied == 0) {
      ++out.second_nearest;
    } else {
      ++out.not_linked;
    }
  }
  out.expected_matches = expected.value();
  return out;
}

GroupSse ComputeGroupSse(const Microdata& md, const Partition& partition, Role role, bool normalized) {
  if (partition.size() != md.n()) throw Error(ErrorKind::kInvalidArgument, "group_sse: partition does not cover table");
  Matrix m = Project(md, role);
  if (normalized) m = MinMaxNormalize(m, ComputeColumnStats(m), NormalizeMode::kLenient);
  GroupSse out;
  for (const auto& group : partition.Members()) {
    const auto centroid = MeanOfRows(m, group);
    CompensatedSum s;
    for (auto r : group) s.Add(SquaredDistance(m.row(r), centroid));
    out.sse_per_group.push_back(s.value());
  }
  out.min_sse = *std::min_element(out.sse_per_group.begin(), out.sse_per_group.end());
  return out;
}

Partition EquivalenceClasses(const Microdata& masked) {
  const Matrix q = Project(masked, Role::kQuasiIdentifier);
  std::map<std::vector<std::uint64_t>, std::size_t> ids;
  std::vector<std::size_t> labels(q.rows());
  for (std::size_t r = 0; r < q.rows(); ++r) {
    auto [it, inserted] = ids.emplace(RowBits(q.row(r)), ids.size());
    labels[r] = it->second;
  }
  return Partition(std::move(labels), 1);
}

KAnonymity CheckKAnonymity(const Microdata& masked, std::size_t k) {
  KAnonymity out;
  out.k_max = EquivalenceClasses(masked).MinGroupSize();
  out.holds = out.k_max >= k;
  return out;
}

bool CheckDiversity(const Partition& partition, std::span<const std::size_t> class_labels,
                    std::span<const std::size_t> scope) {
  if (class_labels.size() != partition.size() || (!scope.empty() && scope.size() != partition.size())) {
    throw Error(ErrorKind::kInvalidArgument, "diversity_check: labels do not match the partition");
  }
  auto scope_of = [&](std::size_t r) { return scope.empty() ? std::size_t{0} : scope[r]; };
  std::map<std::size_t, std::set<std::size_t>> required;
  for (std::size_t r = 0; r < class_labels.size(); ++r) required[scope_of(r)].insert(class_labels[r]);
  for (const auto& group : partition.Members()) {
    const std::size_t s = scope_of(group.front());
    std::set<std::size_t> seen;
    for (auto r : group) {
      if (scope_of(r) != s) throw Error(ErrorKind::kInvalidArgument, "diversity_check: group spans several scopes");
      seen.insert(class_labels[r]);
    }
    if (seen != required[s]) return false;
  }
  return true;
}

std::vector<std::size_t> DeriveConfidentialClasses(const Microdata& original) {
  const Matrix conf = Project(original, Role::kConfidential);
  const Matrix scaled = MinMaxNormalize(conf, ComputeColumnStats(conf), NormalizeMode::kLenient);
  return DiscoverClasses(scaled, CeilSqrt(conf.rows()));
}

nlohmann::json EvaluationReport::ToJson() const {
  nlohmann::json j = {{"n", n},
                      {"il", il},
                      {"il_normalized", il_normalized},
                      {"dbrl",
                       {{"linked", dbrl.linked},
                        {"second_nearest", dbrl.second_nearest},
                        {"not_linked", dbrl.not_linked},
                        {"expected_matches", dbrl.expected_matches}}},
                      {"sse_per_group", sse_per_group},
                      {"min_sse", min_sse},
                      {"k_anonymous_at", k_anonymous_at},
                      {"diversity_ok", diversity_ok}};
  if (k) j["k"] = *k;
  if (k_holds) j["k_anonymous"] = *k_holds;
  return j;
}

std::string EvaluationReport::ToTable() const {
  std::ostringstream os;
  auto pct = [&](double v) { return n ? 100.0 * v / static_cast<double>(n) : 0.0; };
  os << "records               " << n << "\n";
  os << "information loss      " << il << "\n";
  os << "  normalized (x100/n) " << il_normalized << "\n";
  os << "linked                " << dbrl.linked << " (" << pct(static_cast<double>(dbrl.linked)) << "%)\n";
  os << "linked 2nd nearest    " << dbrl.second_nearest << " ("
     << pct(static_cast<double>(dbrl.second_nearest)) << "%)\n";
  os << "not linked            " << dbrl.not_linked << " (" << pct(static_cast<double>(dbrl.not_linked)) << "%)\n";
  os << "expected matches      " << dbrl.expected_matches << "\n";
  os << "groups                " << sse_per_group.size() << "\n";
  os << "min group SSE         " << min_sse << "\n";
  os << "k-anonymous at        " << k_anonymous_at << "\n";
  if (k) os << "k-anonymous for k=" << *k << "  " << (k_holds.value_or(false) ? "yes" : "no") << "\n";
  os << "diversity             " << (diversity_ok ? "ok" : "violated") << "\n";
  return os.str();
}

EvaluationReport Evaluate(const Microdata& original, const Microdata& masked, const EvaluationInputs& inputs) {
  EvaluationReport r;
  r.n = original.n();
  const auto il = ComputeInformationLoss(original, masked);
  r.il = il.il;
  r.il_normalized = il.il_normalized;
  r.dbrl = Dbrl(original, masked);

  const Partition classes = inputs.partition ? *inputs.partition : EquivalenceClasses(masked);
  const auto sse = ComputeGroupSse(original, classes, Role::kConfidential);
  r.sse_per_group = sse.sse_per_group;
  r.min_sse = sse.min_sse;

  r.k_anonymous_at = CheckKAnonymity(masked, 1).k_max;
  if (inputs.k) {
    r.k = inputs.k;
    r.k_holds = r.k_anonymous_at >= *inputs.k;
  }
  if (!inputs.class_labels.empty()) {
    r.diversity_ok = CheckDiversity(classes, inputs.class_labels, inputs.scope);
  } else {
    const auto derived = DeriveConfidentialClasses(original);
    r.diversity_ok = CheckDiversity(classes, derived);
  }
  return r;
}

}  // namespace sdcagg
