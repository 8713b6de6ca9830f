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

// Microdata tables: attribute roles, CSV ingestion and export, column
// statistics, min-max scaling and a synthetic data generator.

#ifndef SDCAGG_CORE_DATASET_HPP_
#define SDCAGG_CORE_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "matrix.hpp"

namespace sdcagg {

enum class Role { kIdentifier, kQuasiIdentifier, kConfidential };

std::string_view RoleName(Role role);
// Accepts "identifier", "quasi_identifier", "confidential".
Role ParseRole(std::string_view name);

struct Attribute {
  std::string name;
  Role role;
  friend bool operator==(const Attribute&, const Attribute&) = default;
};

// Ordered column names with their roles. Always holds at least one
// quasi-identifier and one confidential attribute; names are unique.
class AttributeSchema {
 public:
  explicit AttributeSchema(std::vector<Attribute> attributes);

  // {"attributes":[{"name":..., "role":...}, ...]}
  static AttributeSchema FromJson(const nlohmann::json& j);
  static AttributeSchema FromJsonFile(const std::string& path);
  nlohmann::json ToJson() const;

  const std::vector<Attribute>& attributes() const { return attributes_; }
  std::size_t size() const { return attributes_.size(); }
  std::size_t Count(Role role) const;
  std::vector<std::size_t> IndicesOf(Role role) const;
  std::optional<std::size_t> IndexOf(std::string_view name) const;

  AttributeSchema WithoutIdentifiers() const;

  friend bool operator==(const AttributeSchema&,
                         const AttributeSchema&) = default;

 private:
  std::vector<Attribute> attributes_;
};

// An n x m table of finite reals bound to a schema. Immutable once built.
class Microdata {
 public:
  // `row_ids` defaults to 0..n-1.
  Microdata(AttributeSchema schema, Matrix rows,
            std::vector<std::size_t> row_ids = {});

  const AttributeSchema& schema() const { return schema_; }
  const Matrix& rows() const { return rows_; }
  const std::vector<std::size_t>& row_ids() const { return row_ids_; }
  std::size_t n() const { return rows_.rows(); }
  std::size_t m() const { return rows_.cols(); }
  double operator()(std::size_t r, std::size_t c) const { return rows_(r, c); }

  // Same schema and row ids, new cell values.
  Microdata WithValues(Matrix rows) const;
  Microdata WithoutIdentifiers() const;
  Microdata Subset(std::span<const std::size_t> rows) const;

  friend bool operator==(const Microdata&, const Microdata&) = default;

 private:
  AttributeSchema schema_;
  Matrix rows_;
  std::vector<std::size_t> row_ids_;
};

// Per-column descriptive statistics. `stddev` is the population standard
// deviation (divide by n).
struct ColumnStats {
  std::vector<double> min;
  std::vector<double> max;
  std::vector<double> mean;
  std::vector<double> stddev;
};

ColumnStats ComputeColumnStats(const Microdata& md);
ColumnStats ComputeColumnStats(const Matrix& m);

enum class NormalizeMode {
  kStrict,   // constant columns are an error
  kLenient,  // constant columns map to 0
};

// v' = (v - min) / (max - min), per column.
Microdata MinMaxNormalize(const Microdata& md, const ColumnStats& stats,
                          NormalizeMode mode = NormalizeMode::kStrict);
Matrix MinMaxNormalize(const Matrix& m, const ColumnStats& stats,
                       NormalizeMode mode = NormalizeMode::kStrict);
Microdata MinMaxDenormalize(const Microdata& md, const ColumnStats& stats);

// Columns carrying `role`, in schema order. Throws when the role is absent.
Matrix Project(const Microdata& md, Role role);

// --- CSV ---------------------------------------------------------------

struct LoadOptions {
  // Factorize non-numeric identifier/confidential columns into integer codes
  // in order of first appearance.
  bool encode_categorical = false;
  // Accept files lacking the schema's identifier columns (masked releases).
  bool allow_missing_identifiers = false;
};

// Column name -> code labels (code i is labels[i]).
using CategoryCodes = std::map<std::string, std::vector<std::string>>;

// Parses RFC-4180 text with a header row. The header must name exactly the
// schema's attributes (any order); the result follows schema order.
Microdata ParseCsv(std::string_view text, const AttributeSchema& schema,
                   const LoadOptions& options = {},
                   CategoryCodes* codes = nullptr);
Microdata LoadTable(const std::string& path, const AttributeSchema& schema,
                    const LoadOptions& options = {},
                    CategoryCodes* codes = nullptr);

// Header in schema order; values with 17 significant digits.
std::string ToCsv(const Microdata& md);
void SaveTable(const Microdata& md, const std::string& path);

// %.17g; parses back to the identical double.
std::string FormatDouble(double v);

// Writes to a sibling temporary file and renames it over `path`.
void WriteFileAtomic(const std::string& path, std::string_view content);
std::string ReadFile(const std::string& path);

// --- synthetic data ----------------------------------------------------

struct SynthSpec {
  std::size_t n = 0;
  std::vector<std::vector<double>> blob_centers;   // quasi-identifier space
  std::vector<std::vector<double>> class_centers;  // confidential space
  double noise_scale = 0.0;                        // Gaussian sigma
  std::uint64_t seed = 0;
};

struct SynthData {
  Microdata data;
  std::vector<int> blob_labels;
  std::vector<int> class_labels;
};

// Record i belongs to blob i mod B and class (i / B) mod C, so every blob
// holds a balanced share of every class. Columns are q0.. then s0...
SynthData Synthesize(const SynthSpec& spec);

}  // namespace sdcagg

#endif  // SDCAGG_CORE_DATASET_HPP_
