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

#include "oracles.hpp"

#include <cmath>
#include <limits>

namespace sdcagg::oracle {

double WithinGroupSse(const Matrix& x, const std::vector<std::size_t>& labels) {
  std::size_t g = 0;
  for (std::size_t l : labels) g = std::max(g, l + 1);
  const std::size_t d = x.cols();
  std::vector<double> sum(g * d, 0.0);
  std::vector<double> count(g, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    count[labels[i]] += 1.0;
    for (std::size_t j = 0; j < d; ++j) sum[labels[i] * d + j] += x(i, j);
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = x(i, j) - sum[labels[i] * d + j] / count[labels[i]];
      sse += diff * diff;
    }
  }
  return sse;
}

namespace {

struct Search {
  const Matrix& x;
  std::size_t k;
  std::vector<std::size_t> labels;
  std::vector<std::size_t> sizes;
  OptimalPartition best{std::numeric_limits<double>::infinity(), {}};

  // Restricted growth strings enumerate each set partition once.
  void Recurse(std::size_t i) {
    const std::size_t n = x.rows();
    if (i == n) {
      for (std::size_t s : sizes) {
        if (s < k) return;
      }
      const double sse = WithinGroupSse(x, labels);
      if (sse < best.sse) best = {sse, labels};
      return;
    }
    // Groups that can no longer reach k members make the branch infeasible.
    std::size_t deficit = 0;
    for (std::size_t s : sizes) deficit += s < k ? k - s : 0;
    if (deficit > n - i) return;
    for (std::size_t g = 0; g <= sizes.size(); ++g) {
      if (g == sizes.size()) sizes.push_back(0);
      labels[i] = g;
      ++sizes[g];
      Recurse(i + 1);
      --sizes[g];
      if (sizes[g] == 0) sizes.pop_back();
    }
  }
};

}  // namespace

OptimalPartition OptimalKPartition(const Matrix& x, std::size_t k) {
  Search s{x, k, std::vector<std::size_t>(x.rows(), 0), {}};
  s.Recurse(0);
  return s.best;
}

double InformationLoss(const Matrix& x, const Matrix& y, const std::vector<std::size_t>& cols) {
  const std::size_t n = x.rows();
  std::vector<double> sd;
  for (std::size_t j : cols) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (x(i, j) - mean) * (x(i, j) - mean);
    sd.push_back(std::sqrt(var / static_cast<double>(n)));
  }
  double il = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      row += std::abs(x(i, cols[c]) - y(i, cols[c])) / (std::sqrt(2.0) * sd[c]);
    }
    il += row / static_cast<double>(cols.size());
  }
  return il;
}

}  // namespace sdcagg::oracle
