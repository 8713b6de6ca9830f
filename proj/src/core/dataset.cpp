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

#include "dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "error.hpp"

namespace sdcagg {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::optional<double> ParseNumber(std::string_view s) {
  s = Trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

// RFC-4180 records. Quoted fields may contain separators, quotes ("") and
// line breaks. Blank lines are skipped.
std::vector<std::vector<std::string>> SplitCsv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  auto end_record = [&] {
    if (field_started || !fields.empty()) {
      fields.push_back(std::move(field));
      records.push_back(std::move(fields));
    }
    fields.clear();
    field.clear();
    field_started = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorKind::kData, "CSV: unterminated quoted field");
  end_record();
  return records;
}

std::string QuoteIfNeeded(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kIdentifier:
      return "identifier";
    case Role::kQuasiIdentifier:
      return "quasi_identifier";
    case Role::kConfidential:
      return "confidential";
  }
  return "unknown";
}

Role ParseRole(std::string_view name) {
  if (name == "identifier") return Role::kIdentifier;
  if (name == "quasi_identifier") return Role::kQuasiIdentifier;
  if (name == "confidential") return Role::kConfidential;
  throw Error(ErrorKind::kData, "unknown attribute role '" + std::string(name) + "'");
}

AttributeSchema::AttributeSchema(std::vector<Attribute> attributes)
    : attributes_(std::move(attributes)) {
  std::set<std::string> seen;
  for (const auto& a : attributes_) {
    if (a.name.empty()) throw Error(ErrorKind::kData, "schema: empty attribute name");
    if (!seen.insert(a.name).second) {
      throw Error(ErrorKind::kData, "schema: duplicate attribute '" + a.name + "'");
    }
  }
  if (Count(Role::kQuasiIdentifier) == 0) {
    throw Error(ErrorKind::kData, "schema: at least one quasi_identifier attribute is required");
  }
  if (Count(Role::kConfidential) == 0) {
    throw Error(ErrorKind::kData, "schema: at least one confidential attribute is required");
  }
}

AttributeSchema AttributeSchema::FromJson(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("attributes") || !j["attributes"].is_array()) {
    throw Error(ErrorKind::kData, "schema: expected an object with an \"attributes\" array");
  }
  std::vector<Attribute> attrs;
  for (const auto& a : j["attributes"]) {
    if (!a.is_object() || !a.contains("name") || !a.contains("role") ||
        !a["name"].is_string() || !a["role"].is_string()) {
      throw Error(ErrorKind::kData, "schema: each attribute needs string \"name\" and \"role\"");
    }
    attrs.push_back({a["name"].get<std::string>(), ParseRole(a["role"].get<std::string>())});
  }
  return AttributeSchema(std::move(attrs));
}

AttributeSchema AttributeSchema::FromJsonFile(const std::string& path) {
  const std::string text = ReadFile(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kData, "schema " + path + ": " + e.what());
  }
  return FromJson(j);
}

nlohmann::json AttributeSchema::ToJson() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& a : attributes_) {
    arr.push_back({{"name", a.name}, {"role", std::string(RoleName(a.role))}});
  }
  return {{"attributes", arr}};
}

std::size_t AttributeSchema::Count(Role role) const {
  return static_cast<std::size_t>(std::count_if(
      attributes_.begin(), attributes_.end(), [role](const Attribute& a) { return a.role == role; }));
}

std::vector<std::size_t> AttributeSchema::IndicesOf(Role role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].role == role) out.push_back(i);
  }
  return out;
}

std::optional<std::size_t> AttributeSchema::IndexOf(std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

AttributeSchema AttributeSchema::WithoutIdentifiers() const {
  std::vector<Attribute> kept;
  for (const auto& a : attributes_) {
    if (a.role != Role::kIdentifier) kept.push_back(a);
  }
  return AttributeSchema(std::move(kept));
}

Microdata::Microdata(AttributeSchema schema, Matrix rows, std::vector<std::size_t> row_ids)
    : schema_(std::move(schema)), rows_(std::move(rows)), row_ids_(std::move(row_ids)) {
  if (rows_.rows() == 0) throw Error(ErrorKind::kData, "microdata: at least one record is required");
  if (rows_.cols() != schema_.size()) {
    throw Error(ErrorKind::kData, "microdata: column count " + std::to_string(rows_.cols()) +
                                      " does not match schema size " + std::to_string(schema_.size()));
  }
  for (double v : rows_.data()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kData, "microdata: non-finite cell");
  }
  if (row_ids_.empty()) {
    row_ids_.resize(rows_.rows());
    for (std::size_t i = 0; i < row_ids_.size(); ++i) row_ids_[i] = i;
  } else if (row_ids_.size() != rows_.rows()) {
    throw Error(ErrorKind::kData, "microdata: row id count does not match row count");
  }
}

Microdata Microdata::WithValues(Matrix rows) const {
  return Microdata(schema_, std::move(rows), row_ids_);
}

Microdata Microdata::WithoutIdentifiers() const {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_.attributes()[i].role != Role::kIdentifier) keep.push_back(i);
  }
  return Microdata(schema_.WithoutIdentifiers(), rows_.SelectCols(keep), row_ids_);
}

Microdata Microdata::Subset(std::span<const std::size_t> rows) const {
  std::vector<std::size_t> ids;
  ids.reserve(rows.size());
  for (std::size_t r : rows) ids.push_back(row_ids_[r]);
  return Microdata(schema_, rows_.SelectRows(rows), std::move(ids));
}

ColumnStats ComputeColumnStats(const Matrix& m) {
  ColumnStats s;
  const std::size_t n = m.rows();
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double lo = m(0, c), hi = m(0, c);
    CompensatedSum sum;
    for (std::size_t r = 0; r < n; ++r) {
      lo = std::min(lo, m(r, c));
      hi = std::max(hi, m(r, c));
      sum.Add(m(r, c));
    }
    double mean = std::clamp(sum.value() / static_cast<double>(n), lo, hi);
    double sd = 0.0;
    if (lo != hi) {
      CompensatedSum sq;
      for (std::size_t r = 0; r < n; ++r) {
        const double d = m(r, c) - mean;
        sq.Add(d * d);
      }
      sd = std::sqrt(sq.value() / static_cast<double>(n));
    } else {
      mean = lo;
    }
    s.min.push_back(lo);
    s.max.push_back(hi);
    s.mean.push_back(mean);
    s.stddev.push_back(sd);
  }
  return s;
}

ColumnStats ComputeColumnStats(const Microdata& md) { return ComputeColumnStats(md.rows()); }

Matrix MinMaxNormalize(const Matrix& m, const ColumnStats& stats, NormalizeMode mode) {
  if (stats.min.size() != m.cols()) {
    throw Error(ErrorKind::kInvalidArgument, "normalize: stats do not match column count");
  }
  Matrix out(m.rows(), m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const double lo = stats.min[c];
    const double range = stats.max[c] - lo;
    if (!(range > 0.0)) {
      if (mode == NormalizeMode::kStrict) {
        throw Error(ErrorKind::kData, "normalize: column " + std::to_string(c) + " is constant");
      }
      continue;  // stays 0
    }
    for (std::size_t r = 0; r < m.rows(); ++r) out(r, c) = (m(r, c) - lo) / range;
  }
  return out;
}

Microdata MinMaxNormalize(const Microdata& md, const ColumnStats& stats, NormalizeMode mode) {
  return md.WithValues(MinMaxNormalize(md.rows(), stats, mode));
}

Microdata MinMaxDenormalize(const Microdata& md, const ColumnStats& stats) {
  Matrix out(md.n(), md.m());
  for (std::size_t c = 0; c < md.m(); ++c) {
    const double range = stats.max[c] - stats.min[c];
    for (std::size_t r = 0; r < md.n(); ++r) out(r, c) = md(r, c) * range + stats.min[c];
  }
  return md.WithValues(std::move(out));
}

Matrix Project(const Microdata& md, Role role) {
  const auto idx = md.schema().IndicesOf(role);
  if (idx.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "project: schema has no " + std::string(RoleName(role)) + " attributes");
  }
  return md.rows().SelectCols(idx);
}

Microdata ParseCsv(std::string_view text, const AttributeSchema& schema, const LoadOptions& options,
                   CategoryCodes* codes) {
  const auto records = SplitCsv(text);
  if (records.empty()) throw Error(ErrorKind::kData, "CSV: missing header row");
  const auto& header = records.front();

  // file column -> schema column
  std::vector<std::size_t> target(header.size());
  std::vector<bool> present(schema.size(), false);
  for (std::size_t f = 0; f < header.size(); ++f) {
    const auto idx = schema.IndexOf(Trim(header[f]));
    if (!idx) {
      throw Error(ErrorKind::kData, "header/schema mismatch: column '" + header[f] + "' is not in the schema");
    }
    if (present[*idx]) throw Error(ErrorKind::kData, "header/schema mismatch: duplicate column '" + header[f] + "'");
    present[*idx] = true;
    target[f] = *idx;
  }
  std::vector<Attribute> kept;
  std::vector<std::size_t> schema_to_out(schema.size(), SIZE_MAX);
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& a = schema.attributes()[i];
    if (!present[i]) {
      if (options.allow_missing_identifiers && a.role == Role::kIdentifier) continue;
      throw Error(ErrorKind::kData, "header/schema mismatch: column '" + a.name + "' missing from header");
    }
    schema_to_out[i] = kept.size();
    kept.push_back(a);
  }
  AttributeSchema out_schema(std::move(kept));

  const std::size_t n = records.size() - 1;
  if (n == 0) throw Error(ErrorKind::kData, "CSV: no data rows");
  std::vector<std::vector<std::string_view>> cells(out_schema.size(), std::vector<std::string_view>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto& rec = records[r + 1];
    if (rec.size() != header.size()) {
      throw Error(ErrorKind::kData, "CSV line " + std::to_string(r + 2) + ": expected " +
                                        std::to_string(header.size()) + " fields, got " + std::to_string(rec.size()));
    }
    for (std::size_t f = 0; f < rec.size(); ++f) cells[schema_to_out[target[f]]][r] = rec[f];
  }

  Matrix m(n, out_schema.size());
  for (std::size_t c = 0; c < out_schema.size(); ++c) {
    const auto& attr = out_schema.attributes()[c];
    bool numeric = true;
    for (std::size_t r = 0; r < n && numeric; ++r) {
      if (Trim(cells[c][r]).empty()) {
        throw Error(ErrorKind::kData, "CSV line " + std::to_string(r + 2) + ": missing value for '" +
                                          attr.name + "' (imputation is not supported)");
      }
      if (auto v = ParseNumber(cells[c][r])) {
        m(r, c) = *v;
      } else {
        numeric = false;
      }
    }
    if (numeric) continue;
    if (!options.encode_categorical || attr.role == Role::kQuasiIdentifier) {
      for (std::size_t r = 0; r < n; ++r) {
        if (!ParseNumber(cells[c][r])) {
          throw Error(ErrorKind::kData, "CSV line " + std::to_string(r + 2) + ": cannot parse '" +
                                            std::string(cells[c][r]) + "' as a number in column '" +
                                            attr.name + "'");
        }
      }
    }
    std::vector<std::string> labels;
    std::unordered_map<std::string, std::size_t> lookup;
    for (std::size_t r = 0; r < n; ++r) {
      std::string key(Trim(cells[c][r]));
      auto [it, inserted] = lookup.emplace(key, labels.size());
      if (inserted) labels.push_back(key);
      m(r, c) = static_cast<double>(it->second);
    }
    if (codes) (*codes)[attr.name] = std::move(labels);
  }
  return Microdata(std::move(out_schema), std::move(m));
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Microdata LoadTable(const std::string& path, const AttributeSchema& schema, const LoadOptions& options,
                    CategoryCodes* codes) {
  const std::string text = ReadFile(path);
  try {
    return ParseCsv(text, schema, options, codes);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

std::string FormatDouble(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string ToCsv(const Microdata& md) {
  std::string out;
  const auto& attrs = md.schema().attributes();
  for (std::size_t c = 0; c < attrs.size(); ++c) {
    if (c) out.push_back(',');
    out += QuoteIfNeeded(attrs[c].name);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < md.n(); ++r) {
    for (std::size_t c = 0; c < md.m(); ++c) {
      if (c) out.push_back(',');
      out += FormatDouble(md(r, c));
    }
    out.push_back('\n');
  }
  return out;
}

void WriteFileAtomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorKind::kIo, "short write to '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::kIo, "cannot move output into place at '" + path + "'");
  }
}

void SaveTable(const Microdata& md, const std::string& path) { WriteFileAtomic(path, ToCsv(md)); }

SynthData Synthesize(const SynthSpec& spec) {
  if (spec.n == 0 || spec.blob_centers.empty() || spec.class_centers.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "synthesize: need n >= 1, one blob and one class center");
  }
  const std::size_t dq = spec.blob_centers.front().size();
  const std::size_t ds = spec.class_centers.front().size();
  if (dq == 0 || ds == 0) throw Error(ErrorKind::kInvalidArgument, "synthesize: empty center vector");
  for (const auto& b : spec.blob_centers) {
    if (b.size() != dq) throw Error(ErrorKind::kInvalidArgument, "synthesize: ragged blob centers");
  }
  for (const auto& s : spec.class_centers) {
    if (s.size() != ds) throw Error(ErrorKind::kInvalidArgument, "synthesize: ragged class centers");
  }
  if (spec.noise_scale < 0.0) throw Error(ErrorKind::kInvalidArgument, "synthesize: negative noise scale");

  std::vector<Attribute> attrs;
  for (std::size_t j = 0; j < dq; ++j) attrs.push_back({"q" + std::to_string(j), Role::kQuasiIdentifier});
  for (std::size_t j = 0; j < ds; ++j) attrs.push_back({"s" + std::to_string(j), Role::kConfidential});

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t nb = spec.blob_centers.size();
  const std::size_t nc = spec.class_centers.size();
  Matrix m(spec.n, dq + ds);
  std::vector<int> blobs(spec.n), classes(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const std::size_t b = i % nb;
    const std::size_t k = (i / nb) % nc;
    blobs[i] = static_cast<int>(b);
    classes[i] = static_cast<int>(k);
    for (std::size_t j = 0; j < dq; ++j) m(i, j) = spec.blob_centers[b][j] + spec.noise_scale * noise(rng);
    for (std::size_t j = 0; j < ds; ++j) m(i, dq + j) = spec.class_centers[k][j] + spec.noise_scale * noise(rng);
  }
  return {Microdata(AttributeSchema(std::move(attrs)), std::move(m)), std::move(blobs), std::move(classes)};
}

}  // namespace sdcagg
