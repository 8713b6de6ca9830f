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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "fpclust.hpp"
#include "metrics.hpp"
#include "microagg.hpp"
#include "oracles.hpp"

namespace sdcagg {
namespace {

const std::string kData = SDCAGG_TEST_DATA;

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  std::string failures;
  void Require(bool ok, const std::string& what) {
    if (ok) return;
    failures += failures.empty() ? what : "; " + what;
    pass = false;
  }
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

Microdata Patients() {
  return LoadTable(kData + "/patients.csv", AttributeSchema::FromJsonFile(kData + "/patients_schema.json"),
                   {.encode_categorical = true});
}

Microdata Salaries() {
  return LoadTable(kData + "/salaries.csv", AttributeSchema::FromJsonFile(kData + "/salaries_schema.json"));
}

std::set<std::set<std::size_t>> Groups(const std::vector<std::size_t>& labels) {
  std::map<std::size_t, std::set<std::size_t>> by;
  for (std::size_t i = 0; i < labels.size(); ++i) by[labels[i]].insert(i);
  std::set<std::set<std::size_t>> out;
  for (auto& [l, g] : by) out.insert(g);
  return out;
}

// 1. Centroid release of the patient sample.
void Criterion1(Verdict& v) {
  const auto start = Clock::now();
  const Microdata t1 = Patients();
  const Partition p({0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2}, 3);
  const Microdata masked = CentroidReplace(t1, p);
  const double mean[3][2] = {{2022.25, 26.5}, {1012.5, 50.25}, {1021.75, 34.25}};
  const double shown[3][2] = {{2022, 27}, {1012, 50}, {1021, 34}};
  for (std::size_t g = 0; g < 3; ++g) {
    for (std::size_t j = 0; j < 2; ++j) {
      const double got = masked(4 * g, j);
      v.Require(std::abs(got - mean[g][j]) <= 1e-12, "exact group mean");
      // The printed table rounds some values down and some half up.
      const bool displayed = shown[g][j] == std::floor(got) || shown[g][j] == std::floor(got + 0.5);
      v.Require(displayed, "displayed integer within rounding of the mean");
    }
  }
  v.Require(CheckKAnonymity(masked, 3).holds, "k_anonymity_check(3)");
  const double secs = Seconds(start);
  v.Require(secs < 1.0, "runtime < 1 s");
  v.detail << "means (" << masked(0, 0) << "," << masked(0, 1) << ") (" << masked(4, 0) << "," << masked(4, 1)
           << ") (" << masked(8, 0) << "," << masked(8, 1) << "), k_max " << CheckKAnonymity(masked, 3).k_max << ", "
           << secs << " s";
}

// 2. Salary classes and diverse partition.
void Criterion2(Verdict& v) {
  const auto start = Clock::now();
  const Microdata t4 = Salaries();
  const Matrix salary = Project(t4, Role::kConfidential);
  const Matrix scaled = MinMaxNormalize(salary, ComputeColumnStats(salary));
  const PartitionSelection sel = SelectPartition(scaled, 2, 4);
  // low = x1..x3, middle = x4, x5, x6, x10, x11, x12, high = x7, x8, x9, x13
  const std::vector<std::size_t> truth = {0, 0, 0, 1, 1, 1, 2, 2, 2, 1, 1, 1, 2};
  v.Require(sel.model.c == 3, "3 salary classes selected");
  v.Require(Groups(sel.labels) == Groups(truth), "class membership equals the low/middle/high split");

  const Matrix q = Project(t4, Role::kQuasiIdentifier);
  const Partition p = DiversityPartition(MinMaxNormalize(q, ComputeColumnStats(q)), truth, 1);
  std::multiset<std::size_t> sizes;
  for (const auto& g : p.Members()) sizes.insert(g.size());
  v.Require(p.groups() == 3, "3 groups");
  v.Require(sizes == std::multiset<std::size_t>{4, 4, 5}, "group sizes {4,4,5}");
  v.Require(CheckDiversity(p, truth), "diversity_check");
  const double secs = Seconds(start);
  v.Require(secs < 1.0, "runtime < 1 s");
  v.detail << "selected c " << sel.model.c << " (PCAES";
  for (std::size_t i = 0; i < sel.scores.size(); ++i) v.detail << " c" << i + 2 << "=" << sel.scores[i];
  v.detail << "); group sizes";
  for (std::size_t s : sizes) v.detail << " " << s;
  v.detail << "; " << secs << " s";
}

// 3. Homogeneous versus diverse partition of the patient sample.
void Criterion3(Verdict& v) {
  const std::vector<std::size_t> disease = DeriveConfidentialClasses(Patients());
  const Partition homogeneous({0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2}, 3);
  // G1 = x5, x6, x8; G2 = x2, x7, x10, x12; G3 = x1, x3, x4, x9, x11
  const Partition mixed({2, 1, 2, 2, 0, 0, 1, 0, 2, 1, 2, 1}, 1);
  const bool d2 = CheckDiversity(homogeneous, disease);
  const bool d3 = CheckDiversity(mixed, disease);
  v.Require(!d2, "homogeneous partition not diverse");
  v.Require(d3, "mixed partition diverse");
  v.detail << "homogeneous " << (d2 ? "true" : "false") << ", mixed " << (d3 ? "true" : "false");
}

// 4. MDAV against the exhaustive optimum.
void Criterion4(Verdict& v) {
  const auto start = Clock::now();
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  double worst = 0.0;
  std::size_t within = 0, size_ok = 0;
  const std::size_t trials = 1000;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t k = 2 + t % 2;
    const std::size_t d = 1 + (t / 2) % 2;
    const std::size_t n = k + rng() % (11 - k);
    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) x(i, j) = u(rng);
    }
    const Partition p = MdavPartition(x, k);
    const double got = oracle::WithinGroupSse(x, p.labels());
    const double best = oracle::OptimalKPartition(x, k).sse;
    const double ratio = best > 0.0 ? got / best : (got == 0.0 ? 1.0 : INFINITY);
    worst = std::max(worst, ratio);
    within += ratio <= 1.25 + 1e-12;
    bool sizes = true;
    for (const auto& g : p.Members()) sizes &= g.size() >= k && g.size() <= 2 * k - 1;
    size_ok += sizes;
  }
  const double secs = Seconds(start);
  v.Require(within == trials, "MDAV SSE within 25% of optimum on every instance");
  v.Require(size_ok == trials, "group sizes in [k, 2k-1]");
  v.Require(secs < 60.0, "runtime < 60 s");
  v.detail << within << "/" << trials << " within 25%, worst ratio " << worst << ", sizes ok " << size_ok << "/"
           << trials << ", " << secs << " s";
}

// 5. Metric identities.
void Criterion5(Verdict& v) {
  std::mt19937_64 rng(55);
  std::normal_distribution<double> z;
  const AttributeSchema schema({{"a", Role::kQuasiIdentifier},
                                {"b", Role::kQuasiIdentifier},
                                {"c", Role::kQuasiIdentifier},
                                {"s", Role::kConfidential}});
  Matrix m(200, 4);
  for (std::size_t i = 0; i < 200; ++i) {
    for (std::size_t j = 0; j < 4; ++j) m(i, j) = z(rng) * (j + 1) + 10.0 * j;
  }
  const Microdata x(schema, m);
  v.Require(ComputeInformationLoss(x, x).il == 0.0, "IL(X,X) = 0 exactly");
  const DbrlResult self = Dbrl(x, x);
  v.Require(self.linked == x.n(), "DBRL(X,X) links n of n");

  const Microdata y = CentroidReplace(x, MdavPartition(Project(x, Role::kQuasiIdentifier), 4));
  const double base = ComputeInformationLoss(x, y).il;
  const double ref = oracle::InformationLoss(x.rows(), y.rows(), {0, 1, 2});
  v.Require(std::abs(base - ref) <= 1e-9 * ref, "IL agrees with reference implementation");
  std::uniform_real_distribution<double> coef(-50.0, 50.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a(3), b(3);
    for (std::size_t j = 0; j < 3; ++j) {
      do a[j] = coef(rng);
      while (std::abs(a[j]) < 1e-3);
      b[j] = coef(rng) * 1000.0;
    }
    auto map = [&](const Microdata& md) {
      Matrix out = md.rows();
      for (std::size_t i = 0; i < out.rows(); ++i) {
        for (std::size_t j = 0; j < 3; ++j) out(i, j) = a[j] * out(i, j) + b[j];
      }
      return md.WithValues(std::move(out));
    };
    worst = std::max(worst, std::abs(ComputeInformationLoss(map(x), map(y)).il - base) / base);
  }
  v.Require(worst <= 1e-9, "IL affine invariance to 1e-9");
  v.detail << "linked " << self.linked << "/" << x.n() << ", IL " << base << ", worst affine rel. deviation "
           << worst;
}

struct HmCase {
  Microdata data;
  std::size_t k;
};

HmCase MakeHmCase(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t blobs = 2 + rng() % 3;
  const std::size_t classes = 2 + rng() % 3;
  const std::size_t n = 100 + rng() % 401;
  const std::size_t ks[] = {2, 3, 5};
  const std::size_t k = ks[rng() % 3];
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  SynthSpec spec{.n = n, .noise_scale = 1.0, .seed = seed};
  // Blobs on a ring of radius 15, classes spaced 12 apart.
  for (std::size_t b = 0; b < blobs; ++b) {
    const double angle = 2.0 * M_PI * b / blobs + 0.2 * jitter(rng);
    spec.blob_centers.push_back({15.0 * std::cos(angle), 15.0 * std::sin(angle)});
  }
  for (std::size_t c = 0; c < classes; ++c) spec.class_centers.push_back({12.0 * c + jitter(rng)});
  return {Synthesize(spec).data, k};
}

// 6. HM-pfsom diversity guarantee.
void Criterion6(Verdict& v) {
  const auto start = Clock::now();
  const std::size_t cases = 200;
  std::size_t ok = 0, errors = 0, collapsed = 0;
  std::string first_problem;
  for (std::size_t t = 0; t < cases; ++t) {
    const HmCase hc = MakeHmCase(1000 + t);
    bool good = true;
    std::string why;
    try {
      const AnonymizedResult r = Anonymize(hc.data, {.method = Method::kHmPfsom, .k = hc.k});
      const auto members = r.partition->Members();
      std::size_t group = 0;
      for (const SubMicrodata& sub : r.subs) {
        collapsed += sub.collapsed;
        const std::size_t min_class = *std::min_element(sub.class_sizes.begin(), sub.class_sizes.end());
        if (sub.groups != min_class / hc.k) {
          good = false;
          why = "group count " + std::to_string(sub.groups) + " != floor(" + std::to_string(min_class) + "/" +
                std::to_string(hc.k) + ")";
        }
        std::map<std::size_t, std::size_t> class_of;
        for (std::size_t m = 0; m < sub.members.size(); ++m) class_of[sub.members[m]] = sub.class_labels[m];
        for (std::size_t g = 0; g < sub.groups; ++g, ++group) {
          std::vector<std::size_t> counts(sub.cs, 0);
          for (std::size_t i : members[group]) ++counts[class_of.at(i)];
          for (std::size_t c : counts) {
            if (c < hc.k) {
              good = false;
              why = "group with " + std::to_string(c) + " members of a class";
            }
          }
        }
      }
      if (!CheckKAnonymity(r.masked, hc.k).holds) {
        good = false;
        why = "k-anonymity";
      }
    } catch (const Error& e) {
      good = false;
      ++errors;
      why = e.what();
    }
    ok += good;
    if (!good && first_problem.empty()) first_problem = "case " + std::to_string(t) + ": " + why;
  }
  const double secs = Seconds(start);
  v.Require(ok == cases, "every dataset satisfies the guarantee");
  v.Require(secs < 120.0, "runtime < 120 s");
  v.detail << ok << "/" << cases << " datasets ok, " << errors << " errors, " << collapsed << " collapsed subs, "
           << secs << " s";
  if (!first_problem.empty()) v.detail << "; first: " << first_problem;
}

Microdata Fixed500(std::uint64_t seed) {
  return Synthesize({.n = 500,
                     .blob_centers = {{0, 0}, {12, 0}, {6, 10}},
                     .class_centers = {{0}, {10}, {20}},
                     .noise_scale = 2.0,
                     .seed = seed})
      .data;
}

// 7. MDAV trade-off trend over k.
void Criterion7(Verdict& v) {
  const std::vector<std::size_t> ks = {2, 5, 10, 20, 50};
  std::vector<double> il(ks.size(), 0.0), linked(ks.size(), 0.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Microdata x = Fixed500(seed);
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const AnonymizedResult r = Anonymize(x, {.method = Method::kMdav, .k = ks[i]});
      il[i] += ComputeInformationLoss(x, r.masked).il / 5.0;
      linked[i] += static_cast<double>(Dbrl(x, r.masked).linked) / 5.0;
    }
  }
  for (std::size_t i = 1; i < ks.size(); ++i) {
    v.Require(il[i] >= il[i - 1], "IL non-decreasing at k=" + std::to_string(ks[i]));
    v.Require(linked[i] <= linked[i - 1], "linked non-increasing at k=" + std::to_string(ks[i]));
  }
  for (std::size_t i = 0; i < ks.size(); ++i) {
    v.detail << (i ? ", " : "") << "k=" << ks[i] << " IL " << il[i] << " linked " << linked[i];
  }
}

// 8. HM-pfsom against MDAV at equal minimum group size.
void Criterion8(Verdict& v) {
  const Microdata x = Fixed500(1);
  for (std::size_t k : {2, 3, 5}) {
    const AnonymizedResult hm = Anonymize(x, {.method = Method::kHmPfsom, .k = k});
    const std::size_t size = hm.partition->MinGroupSize();
    const AnonymizedResult md = Anonymize(x, {.method = Method::kMdav, .k = size});
    const double hm_sse = ComputeGroupSse(x, *hm.partition).min_sse;
    const double md_sse = ComputeGroupSse(x, *md.partition).min_sse;
    const double hm_il = ComputeInformationLoss(x, hm.masked).il;
    const double md_il = ComputeInformationLoss(x, md.masked).il;
    v.Require(hm_sse >= md_sse, "min SSE at k=" + std::to_string(k));
    v.Require(hm_il >= md_il, "IL at k=" + std::to_string(k));
    v.detail << (k == 2 ? "" : "; ") << "k=" << k << " min size " << size << ": min SSE " << hm_sse << " vs "
             << md_sse << ", IL " << hm_il << " vs " << md_il;
  }
}

// 9. Fuzzy-possibilistic clustering properties.
void Criterion9(Verdict& v) {
  std::mt19937_64 rng(909);
  std::normal_distribution<double> z;
  double worst_sum = 0.0, worst_rise = 0.0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 3 + rng() % 120;
    const std::size_t d = 1 + rng() % 4;
    const std::size_t c = 1 + rng() % std::min<std::size_t>(n, 8);
    Matrix x(n, d);
    const double scale = std::pow(10.0, static_cast<double>(rng() % 7) - 3.0);
    for (double& e : const_cast<std::vector<double>&>(x.data())) e = z(rng) * scale;
    FuzzinessParams params;
    params.m_fuzz = 1.5 + (rng() % 4) * 0.5;
    params.eta = 1.5 + (rng() % 4) * 0.5;
    const ClusterModel m = FpCluster(x, c, params);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < c; ++j) s += m.memberships(i, j);
      worst_sum = std::max(worst_sum, std::abs(s - 1.0));
    }
    for (std::size_t j = 0; j < c; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += m.typicalities(i, j);
      worst_sum = std::max(worst_sum, std::abs(s - 1.0));
    }
    for (std::size_t i = 1; i < m.objective_trace.size(); ++i) {
      const double prev = m.objective_trace[i - 1];
      worst_rise = std::max(worst_rise, (m.objective_trace[i] - prev) / std::max(1.0, std::abs(prev)));
    }
  }
  v.Require(worst_sum <= 1e-9, "row/column sums within 1e-9");
  v.Require(worst_rise <= 1e-9, "objective non-increasing");

  std::size_t hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Microdata d = Synthesize({.n = 300,
                                    .blob_centers = {{0, 0}, {10, 0}, {5, 8}},
                                    .class_centers = {{0}},
                                    .noise_scale = 1.0,
                                    .seed = seed})
                            .data;
    hits += SelectPartition(Project(d, Role::kQuasiIdentifier), 2, 6).model.c == 3;
  }
  v.Require(hits >= 95, "3-blob selection >= 95/100");
  v.detail << "worst sum deviation " << worst_sum << ", worst relative objective rise " << worst_rise
           << ", 3-blob hits " << hits << "/100";
}

}  // namespace
}  // namespace sdcagg

int main() {
  using namespace sdcagg;
  const std::vector<std::pair<const char*, std::function<void(Verdict&)>>> criteria = {
      {"patient sample centroid release at k=4", Criterion1},
      {"salary classes and diverse 3-partition", Criterion2},
      {"diversity check separates homogeneous from mixed groups", Criterion3},
      {"MDAV within 25% of the optimal k-partition", Criterion4},
      {"metric identities", Criterion5},
      {"HM-pfsom diversity guarantee on 200 datasets", Criterion6},
      {"MDAV information loss and linkage trend over k", Criterion7},
      {"HM-pfsom costs utility against MDAV", Criterion8},
      {"fuzzy-possibilistic clustering properties", Criterion9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.Require(false, std::string("exception: ") + e.what());
    }
    std::string line = v.detail.str();
    if (!v.pass) line += " | not met: " + v.failures;
    std::printf("%s [%zu] %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, line.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
