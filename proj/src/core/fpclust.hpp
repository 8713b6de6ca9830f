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

// Fuzzy-possibilistic c-means with PCAES-driven selection of the cluster
// count.
//
// Each iteration alternates three exact minimization steps of
//
//   J = sum_i sum_j (u_ij^m + t_ij^eta) * ||x_i - v_j||^2
//
// subject to sum_j u_ij = 1 (memberships, per record) and sum_i t_ij = 1
// (typicalities, per cluster):
//
//   u_ij = 1 / sum_k (D_ij / D_ik)^(1/(m-1))
//   t_ij = 1 / sum_l (D_ij / D_lj)^(1/(eta-1))
//   v_j  = sum_i w_ij x_i / sum_i w_ij,   w_ij = u_ij^m + t_ij^eta
//
// where D is the squared Euclidean distance, floored at kDistanceFloor.

#ifndef SDCAGG_CORE_FPCLUST_HPP_
#define SDCAGG_CORE_FPCLUST_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "matrix.hpp"

namespace sdcagg {

inline constexpr double kDistanceFloor = 1e-12;

struct FuzzinessParams {
  double m_fuzz = 2.0;  // membership fuzzifier, > 1
  double eta = 2.0;     // typicality fuzzifier, > 1
  int max_iter = 300;
  double tol = 1e-6;  // max center movement (Euclidean) at convergence
  // Carried for reproducibility records; the default initialization is
  // deterministic and does not draw from it.
  std::uint64_t seed = 0;

  void Validate() const;
};

struct ClusterModel {
  Matrix centers;       // c x d
  Matrix memberships;   // n x c, rows sum to 1
  Matrix typicalities;  // n x c, columns sum to 1
  std::size_t c = 0;
  int iterations_run = 0;
  bool converged = false;
  // J after every center update.
  std::vector<double> objective_trace;

  nlohmann::json ToJson() const;
};

// Indices of c distinct records: the one nearest the grand mean, then
// repeatedly the record farthest from all chosen ones. Ties go to the lowest
// row index.
std::vector<std::size_t> FarthestPointSeeds(const Matrix& data, std::size_t c);

ClusterModel FpCluster(const Matrix& data, std::size_t c,
                       const FuzzinessParams& params = {});

double FpObjective(const Matrix& data, const ClusterModel& model,
                   const FuzzinessParams& params);

// Partition Coefficient and Exponential Separation:
//   sum_j [ sum_i u_ij^2 / u_M  -  exp(-min_{k!=j} ||v_j - v_k||^2 / beta_T) ]
// with u_M = max_j sum_i u_ij^2 and beta_T = sum_j ||v_j - vbar||^2 / c,
// vbar the mean of the centers. Each compactness term lies in (0, 1], so the
// score lies in (-c, c); higher is better. Requires c >= 2 and
// non-coincident centers.
double Pcaes(const Matrix& data, const ClusterModel& model);

// argmin_j ||x_i - v_j||, ties to the lowest j.
std::vector<std::size_t> NearestCenterLabels(const Matrix& data,
                                             const Matrix& centers);

struct PartitionSelection {
  ClusterModel model;
  std::vector<std::size_t> labels;  // hard labels, 0..model.c-1, all used
  std::size_t selected_c = 0;       // count chosen by the sweep, pre-pruning
  // PCAES per candidate c_min..c_max; NaN where the model was degenerate.
  std::vector<double> scores;
};

// Runs FpCluster for every c in [c_min, c_max], keeps the PCAES maximizer
// (ties to the smaller c), hardens by nearest center and prunes empty
// clusters.
PartitionSelection SelectPartition(const Matrix& data, std::size_t c_min,
                                   std::size_t c_max,
                                   const FuzzinessParams& params = {});

// Class labels for `data`. When it holds at most `c_max` distinct rows, each
// distinct row is its own class, numbered in lexicographic order. Otherwise
// the labels come from SelectPartition over [2, c_max]; a fully degenerate
// sweep yields a single class.
std::vector<std::size_t> DiscoverClasses(const Matrix& data, std::size_t c_max,
                                         const FuzzinessParams& params = {});

}  // namespace sdcagg

#endif  // SDCAGG_CORE_FPCLUST_HPP_
