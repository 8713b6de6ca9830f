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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dataset.hpp"
#include "error.hpp"

namespace sdcagg {
namespace {

namespace fs = std::filesystem;

class BenchTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sdcagg_bench_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

SynthData Synth300(std::uint64_t seed) {
  return Synthesize({.n = 300,
                     .blob_centers = {{0, 0}, {10, 0}, {5, 8}},
                     .class_centers = {{0}, {10}},
                     .noise_scale = 2.0,
                     .seed = seed});
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

// Every CSV cell except wall_time_ms.
std::string WithoutTiming(const std::string& csv) {
  std::string out;
  for (const auto& line : Lines(csv)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    cells.erase(cells.begin() + 9);
    for (const auto& c : cells) out += c + ",";
    out += "\n";
  }
  return out;
}

TEST_F(BenchTest, SingleRowToyTable) {
  const AttributeSchema schema({{"q", Role::kQuasiIdentifier}, {"s", Role::kConfidential}});
  const Microdata md(schema, Matrix::FromRows({{1, 0}, {2, 1}, {8, 0}, {9, 1}}));
  SweepSpec spec{.methods = {Method::kMdav}, .k_values = {2}};
  const auto rows = RunSweep(md, spec);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].error.has_value());
  EXPECT_GE(rows[0].k_max, 2u);
  const auto files = EmitReport(rows, dir_.string(), "toy", ReportFormat::kCsv);
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(fs::path(files[0]).filename(), "sweep_toy.csv");
  const auto lines = Lines(ReadFile(files[0]));
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0].rfind(
                "method,k,il,il_normalized,linked,second_nearest,expected_matches,min_sse,k_max,wall_time_ms", 0),
            0u);
}

TEST_F(BenchTest, MdavTrendOverK) {
  const SynthData d = Synth300(4);
  SweepSpec spec{.methods = {Method::kMdav}, .k_values = {2, 5, 10, 20}};
  const auto rows = RunSweep(d.data, spec);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_GE(rows[i].k_max, rows[i].k);
    if (i == 0) continue;
    EXPECT_GE(rows[i].il, rows[i - 1].il);
    EXPECT_LE(rows[i].linked, rows[i - 1].linked);
  }
}

TEST_F(BenchTest, JsonRowsAndSubStructure) {
  const SynthData d = Synth300(1);
  SweepSpec spec{.methods = {Method::kMdav, Method::kHmPfsom}, .k_values = {3}};
  const auto rows = RunSweep(d.data, spec);
  const auto j = SweepJson(rows);
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), 2u);
  for (const auto& row : j) {
    for (const char* key : {"method", "k", "il", "il_normalized", "linked", "second_nearest",
                            "expected_matches", "min_sse", "k_max", "wall_time_ms"}) {
      EXPECT_TRUE(row.contains(key)) << key;
    }
  }
  EXPECT_FALSE(j[0].contains("sub_structure"));
  ASSERT_TRUE(j[1].contains("sub_structure")) << j[1].dump();
  EXPECT_EQ(j[1]["sub_structure"]["cs"].size(), j[1]["sub_structure"]["c"].get<std::size_t>());
}

TEST_F(BenchTest, RowErrorsDoNotStopTheSweep) {
  const SynthData d = Synth300(2);
  SweepSpec spec{.methods = {Method::kHmPfsom, Method::kMdav}, .k_values = {2, 400}};
  const auto rows = RunSweep(d.data, spec);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_FALSE(rows[0].error.has_value());
  EXPECT_TRUE(rows[1].error.has_value());
  EXPECT_FALSE(rows[2].error.has_value());
  EXPECT_TRUE(rows[3].error.has_value());
  EXPECT_NE(SweepCsv(rows).find("error"), std::string::npos);
}

TEST_F(BenchTest, DeterministicApartFromTiming) {
  const SynthData d = Synth300(3);
  SweepSpec spec{.methods = {Method::kMdav, Method::kSingleAxisPca, Method::kHmPfsom},
                 .k_values = {2, 5},
                 .seed = 7,
                 .workers = 3};
  const std::string a = SweepCsv(RunSweep(d.data, spec));
  spec.workers = 1;
  const std::string b = SweepCsv(RunSweep(d.data, spec));
  EXPECT_EQ(WithoutTiming(a), WithoutTiming(b));
}

TEST_F(BenchTest, SpecFromFileResolvesPaths) {
  const SynthData d = Synth300(5);
  SaveTable(d.data, (dir_ / "synth.csv").string());
  WriteFileAtomic((dir_ / "schema.json").string(), d.data.schema().ToJson().dump());
  WriteFileAtomic((dir_ / "spec.json").string(), R"({
    "dataset": "synth.csv", "schema": "schema.json",
    "methods": ["mdav", "individual_sorting"], "k_values": [2, 4, 8],
    "output_dir": "out", "format": "csv", "long_format": true})");
  const SweepSpec spec = SweepSpec::FromFile((dir_ / "spec.json").string());
  EXPECT_EQ(fs::path(spec.dataset), dir_ / "synth.csv");
  const auto rows = RunSweep(spec);
  EXPECT_EQ(rows.size(), 6u);
  fs::create_directories(spec.output_dir);
  const auto files = EmitReport(rows, spec.output_dir, "synth", spec.format, spec.long_format);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(Lines(ReadFile(files[0])).size(), 7u);
  EXPECT_EQ(Lines(ReadFile(files[1]))[0], "method,k,metric,value");
}

TEST_F(BenchTest, SpecValidation) {
  auto kind = [](const std::string& text) {
    try {
      SweepSpec::FromJson(nlohmann::json::parse(text));
    } catch (const Error& e) {
      return std::optional<std::string>(e.what());
    }
    return std::optional<std::string>();
  };
  const std::string base = R"("dataset":"a.csv","schema":"s.json")";
  EXPECT_FALSE(kind("{" + base + R"(,"methods":["mdav"],"k_values":[2]})").has_value());
  const auto bad = kind("{" + base + R"(,"methods":["kmeans"],"k_values":[2]})");
  ASSERT_TRUE(bad.has_value());
  EXPECT_NE(bad->find("kmeans"), std::string::npos);
  EXPECT_TRUE(kind("{" + base + R"(,"methods":[],"k_values":[2]})").has_value());
  EXPECT_TRUE(kind("{" + base + R"(,"methods":["mdav"],"k_values":[3,2]})").has_value());
  EXPECT_TRUE(kind("{" + base + R"(,"methods":["mdav"],"k_values":[0]})").has_value());
  EXPECT_TRUE(kind(R"({"methods":["mdav"],"k_values":[2]})").has_value());
}

TEST_F(BenchTest, MissingDatasetFailsTheSweep) {
  SweepSpec spec{.dataset = (dir_ / "none.csv").string(),
                 .schema = (dir_ / "none.json").string(),
                 .methods = {Method::kMdav},
                 .k_values = {2}};
  EXPECT_THROW(RunSweep(spec), Error);
}

TEST_F(BenchTest, UnwritableOutput) {
  const SweepRow row{.method = Method::kMdav, .k = 2};
  WriteFileAtomic((dir_ / "file").string(), "x");
  EXPECT_THROW(EmitReport({row}, (dir_ / "file" / "sub").string(), "x", ReportFormat::kJson), Error);
}

}  // namespace
}  // namespace sdcagg
