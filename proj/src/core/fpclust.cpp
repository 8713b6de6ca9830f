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

#include "fpclust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "error.hpp"

namespace sdcagg {
namespace {

Matrix SquaredDistances(const Matrix& data, const Matrix& centers) {
  Matrix d(data.rows(), centers.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < centers.rows(); ++j) {
      d(i, j) = std::max(SquaredDistance(data.row(i), centers.row(j)), kDistanceFloor);
    }
  }
  return d;
}

// std::pow, short-circuiting the exponents of the default fuzzifiers. Both
// shortcuts are exact, so results do not depend on which path ran.
double Power(double x, double e) {
  if (e == 1.0) return x;
  if (e == 2.0) return x * x;
  return std::pow(x, e);
}

// u_ij = D_ij^-p / sum_k D_ik^-p, evaluated as ratios to the row minimum so
// every term is in (0, 1].
Matrix Memberships(const Matrix& dist, double m_fuzz) {
  const double p = 1.0 / (m_fuzz - 1.0);
  Matrix u(dist.rows(), dist.cols());
  for (std::size_t i = 0; i < dist.rows(); ++i) {
    const auto row = dist.row(i);
    const double dmin = *std::min_element(row.begin(), row.end());
    double sum = 0.0;
    for (std::size_t j = 0; j < dist.cols(); ++j) {
      u(i, j) = Power(dmin / row[j], p);
      sum += u(i, j);
    }
    for (std::size_t j = 0; j < dist.cols(); ++j) u(i, j) /= sum;
  }
  return u;
}

// t_ij = D_ij^-p / sum_l D_lj^-p, normalized over the records of cluster j.
Matrix Typicalities(const Matrix& dist, double eta) {
  const double p = 1.0 / (eta - 1.0);
  Matrix t(dist.rows(), dist.cols());
  for (std::size_t j = 0; j < dist.cols(); ++j) {
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dist.rows(); ++i) dmin = std::min(dmin, dist(i, j));
    double sum = 0.0;
    for (std::size_t i = 0; i < dist.rows(); ++i) {
      t(i, j) = Power(dmin / dist(i, j), p);
      sum += t(i, j);
    }
    for (std::size_t i = 0; i < dist.rows(); ++i) t(i, j) /= sum;
  }
  return t;
}

Matrix UpdateCenters(const Matrix& data, const Matrix& u, const Matrix& t, const FuzzinessParams& params) {
  const std::size_t c = u.cols();
  Matrix centers(c, data.cols());
  for (std::size_t j = 0; j < c; ++j) {
    double wsum = 0.0;
    std::vector<double> acc(data.cols(), 0.0);
    for (std::size_t i = 0; i < data.rows(); ++i) {
      const double w = Power(u(i, j), params.m_fuzz) + Power(t(i, j), params.eta);
      wsum += w;
      for (std::size_t a = 0; a < data.cols(); ++a) acc[a] += w * data(i, a);
    }
    for (std::size_t a = 0; a < data.cols(); ++a) centers(j, a) = acc[a] / wsum;
  }
  return centers;
}

double Objective(const Matrix& dist, const Matrix& u, const Matrix& t, const FuzzinessParams& params) {
  double j_total = 0.0;
  for (std::size_t i = 0; i < dist.rows(); ++i) {
    for (std::size_t j = 0; j < dist.cols(); ++j) {
      j_total += (Power(u(i, j), params.m_fuzz) + Power(t(i, j), params.eta)) * dist(i, j);
    }
  }
  return j_total;
}

}  // namespace

void FuzzinessParams::Validate() const {
  if (!(m_fuzz > 1.0)) throw Error(ErrorKind::kInvalidArgument, "m_fuzz must be > 1");
  if (!(eta > 1.0)) throw Error(ErrorKind::kInvalidArgument, "eta must be > 1");
  if (!(tol > 0.0)) throw Error(ErrorKind::kInvalidArgument, "tol must be > 0");
  if (max_iter < 1) throw Error(ErrorKind::kInvalidArgument, "max_iter must be >= 1");
}

nlohmann::json ClusterModel::ToJson() const {
  auto rows_of = [](const Matrix& m) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto row = m.row(r);
      arr.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return arr;
  };
  return {{"c", c},
          {"centers", rows_of(centers)},
          {"U", rows_of(memberships)},
          {"T", rows_of(typicalities)},
          {"iterations_run", iterations_run},
          {"converged", converged}};
}

std::vector<std::size_t> FarthestPointSeeds(const Matrix& data, std::size_t c) {
  const std::size_t n = data.rows();
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  const auto mean = MeanOfRows(data, all);

  std::vector<std::size_t> seeds;
  std::vector<bool> chosen(n, false);
  std::size_t first = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = SquaredDistance(data.row(i), mean);
    if (d < best) {
      best = d;
      first = i;
    }
  }
  seeds.push_back(first);
  chosen[first] = true;

  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (seeds.size() < c) {
    const auto last = data.row(seeds.back());
    std::size_t pick = n;
    double far = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], SquaredDistance(data.row(i), last));
      if (!chosen[i] && nearest[i] > far) {
        far = nearest[i];
        pick = i;
      }
    }
    seeds.push_back(pick);
    chosen[pick] = true;
  }
  return seeds;
}

ClusterModel FpCluster(const Matrix& data, std::size_t c, const FuzzinessParams& params) {
  params.Validate();
  if (data.rows() == 0 || data.cols() == 0) throw Error(ErrorKind::kInvalidArgument, "fp_cluster: empty data");
  if (c < 1 || c > data.rows()) {
    throw Error(ErrorKind::kInvalidArgument, "fp_cluster: cluster count " + std::to_string(c) +
                                                 " outside [1, " + std::to_string(data.rows()) + "]");
  }
  ClusterModel model;
  model.c = c;
  const auto seeds = FarthestPointSeeds(data, c);
  model.centers = data.SelectRows(seeds);

  for (int iter = 1; iter <= params.max_iter; ++iter) {
    const Matrix dist = SquaredDistances(data, model.centers);
    const Matrix u = Memberships(dist, params.m_fuzz);
    const Matrix t = Typicalities(dist, params.eta);
    Matrix next = UpdateCenters(data, u, t, params);

    double moved = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      moved = std::max(moved, std::sqrt(SquaredDistance(next.row(j), model.centers.row(j))));
    }
    model.centers = std::move(next);
    model.iterations_run = iter;
    model.objective_trace.push_back(Objective(SquaredDistances(data, model.centers), u, t, params));
    if (moved < params.tol) {
      model.converged = true;
      break;
    }
  }
  const Matrix dist = SquaredDistances(data, model.centers);
  model.memberships = Memberships(dist, params.m_fuzz);
  model.typicalities = Typicalities(dist, params.eta);
  return model;
}

double FpObjective(const Matrix& data, const ClusterModel& model, const FuzzinessParams& params) {
  return Objective(SquaredDistances(data, model.centers), model.memberships, model.typicalities, params);
}

double Pcaes(const Matrix& data, const ClusterModel& model) {
  const std::size_t c = model.c;
  if (c < 2) throw Error(ErrorKind::kInvalidArgument, "pcaes: requires at least 2 clusters");
  if (model.memberships.rows() != data.rows() || model.memberships.cols() != c) {
    throw Error(ErrorKind::kInvalidArgument, "pcaes: model does not match data");
  }
  std::vector<double> compact(c, 0.0);
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t i = 0; i < data.rows(); ++i) compact[j] += model.memberships(i, j) * model.memberships(i, j);
  }
  const double u_max = *std::max_element(compact.begin(), compact.end());

  std::vector<std::size_t> all(c);
  for (std::size_t j = 0; j < c; ++j) all[j] = j;
  const auto vbar = MeanOfRows(model.centers, all);
  double beta = 0.0;
  for (std::size_t j = 0; j < c; ++j) beta += SquaredDistance(model.centers.row(j), vbar);
  beta /= static_cast<double>(c);
  double scale = 1.0;
  for (double x : vbar) scale = std::max(scale, x * x);
  if (!(beta > 1e-18 * scale) || !(u_max > 0.0)) {
    throw Error(ErrorKind::kMethod, "pcaes: degenerate model (coincident centers)");
  }

  double score = 0.0;
  for (std::size_t j = 0; j < c; ++j) {
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < c; ++k) {
      if (k != j) sep = std::min(sep, SquaredDistance(model.centers.row(j), model.centers.row(k)));
    }
    score += compact[j] / u_max - std::exp(-sep / beta);
  }
  return score;
}

std::vector<std::size_t> NearestCenterLabels(const Matrix& data, const Matrix& centers) {
  std::vector<std::size_t> labels(data.rows(), 0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centers.rows(); ++j) {
      const double d = SquaredDistance(data.row(i), centers.row(j));
      if (d < best) {
        best = d;
        labels[i] = j;
      }
    }
  }
  return labels;
}

PartitionSelection SelectPartition(const Matrix& data, std::size_t c_min, std::size_t c_max,
                                   const FuzzinessParams& params) {
  if (c_min < 2 || c_min > c_max || c_max > data.rows()) {
    throw Error(ErrorKind::kInvalidArgument, "select_partition: invalid cluster range [" + std::to_string(c_min) +
                                                 ", " + std::to_string(c_max) + "] for " +
                                                 std::to_string(data.rows()) + " records");
  }
  PartitionSelection out;
  double best = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t c = c_min; c <= c_max; ++c) {
    ClusterModel model = FpCluster(data, c, params);
    double score = std::numeric_limits<double>::quiet_NaN();
    try {
      score = Pcaes(data, model);
    } catch (const Error&) {
      out.scores.push_back(score);
      continue;
    }
    out.scores.push_back(score);
    if (!found || score > best) {
      best = score;
      out.model = std::move(model);
      out.selected_c = c;
      found = true;
    }
  }
  if (!found) throw Error(ErrorKind::kMethod, "select_partition: all candidate models are degenerate");

  auto labels = NearestCenterLabels(data, out.model.centers);
  std::vector<std::size_t> used(out.model.c, 0);
  for (auto l : labels) ++used[l];
  std::vector<std::size_t> keep;
  std::vector<std::size_t> remap(out.model.c, 0);
  for (std::size_t j = 0; j < out.model.c; ++j) {
    if (used[j] > 0) {
      remap[j] = keep.size();
      keep.push_back(j);
    }
  }
  if (keep.size() != out.model.c) {
    out.model.centers = out.model.centers.SelectRows(keep);
    out.model.c = keep.size();
    const Matrix dist = SquaredDistances(data, out.model.centers);
    out.model.memberships = Memberships(dist, params.m_fuzz);
    out.model.typicalities = Typicalities(dist, params.eta);
    for (auto& l : labels) l = remap[l];
  }
  out.labels = std::move(labels);
  return out;
}

std::vector<std::size_t> DiscoverClasses(const Matrix& data, std::size_t c_max,
                                         const FuzzinessParams& params) {
  const std::size_t n = data.rows();
  std::vector<std::size_t> labels(n, 0);
  std::map<std::vector<double>, std::size_t> distinct;
  for (std::size_t i = 0; i < n && distinct.size() <= c_max; ++i) {
    const auto row = data.row(i);
    distinct.emplace(std::vector<double>(row.begin(), row.end()), 0);
  }
  if (distinct.size() <= c_max) {
    std::size_t next = 0;
    for (auto& entry : distinct) entry.second = next++;
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = data.row(i);
      labels[i] = distinct.at(std::vector<double>(row.begin(), row.end()));
    }
    return labels;
  }
  try {
    return SelectPartition(data, 2, std::min(c_max, n), params).labels;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kMethod) throw;
  }
  return labels;
}

}  // namespace sdcagg
