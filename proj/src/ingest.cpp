/*
 * Copyright 2026 The tabprompt Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tabprompt/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "tabprompt/serializer.hpp"
#include "tabprompt/text.hpp"

namespace tabprompt {
namespace {

bool IsBooleanToken(std::string_view s) {
  static const std::unordered_set<std::string_view> kTokens = {
      "true", "false", "True", "False", "TRUE", "FALSE"};
  return kTokens.contains(s);
}

enum class CellClass { kBoolean, kInteger, kFloat, kText };

CellClass Classify(std::string_view s) {
  if (IsBooleanToken(s)) return CellClass::kBoolean;
  if (ParseInt64(s)) return CellClass::kInteger;
  if (ParseDouble(s)) return CellClass::kFloat;
  return CellClass::kText;
}

// pandas-compatible header cleanup: blank names become "Unnamed: {i}" and
// repeats get a ".{k}" suffix.
std::vector<std::string> CleanHeader(const std::vector<std::string>& raw) {
  std::vector<std::string> names;
  std::unordered_map<std::string, int> seen;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    std::string name = raw[i].empty() ? "Unnamed: " + std::to_string(i) : raw[i];
    std::string candidate = name;
    while (seen.contains(candidate)) {
      candidate = name + "." + std::to_string(seen[name]++);
    }
    seen.emplace(candidate, 1);
    names.push_back(candidate);
  }
  return names;
}

}  // namespace

std::string_view ColumnKindName(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kInteger: return "integer";
    case ColumnKind::kFloat: return "float";
    case ColumnKind::kText: return "text";
    case ColumnKind::kBoolean: return "boolean";
  }
  return "text";
}

std::size_t Dataset::ColumnIndex(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  throw Error(ErrorKind::kNotFound, "dataset '" + id + "' has no column '" + std::string(name) + "'");
}

std::size_t Dataset::TargetIndex() const {
  if (!target_column) throw Error(ErrorKind::kInvalidArgument, "dataset '" + id + "' has no target column");
  return ColumnIndex(*target_column);
}

std::vector<std::string> Dataset::ColumnNames() const {
  std::vector<std::string> names;
  names.reserve(columns.size());
  for (const auto& c : columns) names.push_back(c.name);
  return names;
}

std::vector<std::vector<std::string>> ParseCsv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    // A blank line yields one empty field; skip it.
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started) {
          in_quotes = true;
          field_started = true;
        } else {
          field += c;
        }
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorKind::kParse, "unterminated quoted field");
  if (field_started || !record.empty()) end_record();
  return records;
}

bool IsMissingToken(std::string_view raw) {
  static const std::unordered_set<std::string_view> kTokens = {
      "", "NA", "N/A", "n/a", "NaN", "nan", "null", "NULL", "#N/A"};
  return kTokens.contains(raw);
}

std::vector<ColumnSchema> InferSchema(const std::vector<std::string>& names,
                                      const std::vector<Row>& rows) {
  std::vector<ColumnSchema> schema;
  schema.reserve(names.size());
  for (std::size_t c = 0; c < names.size(); ++c) {
    ColumnSchema col{names[c], ColumnKind::kFloat, 0};
    bool all_bool = true, all_int = true, all_numeric = true;
    std::size_t present = 0;
    for (const Row& row : rows) {
      const Cell& cell = row.cells[c];
      if (!cell) {
        ++col.missing_count;
        continue;
      }
      ++present;
      switch (Classify(*cell)) {
        case CellClass::kBoolean: all_int = all_numeric = false; break;
        case CellClass::kInteger: all_bool = false; break;
        case CellClass::kFloat: all_bool = all_int = false; break;
        case CellClass::kText: all_bool = all_int = all_numeric = false; break;
      }
    }
    if (present == 0) {
      col.kind = ColumnKind::kFloat;
    } else if (all_bool) {
      col.kind = ColumnKind::kBoolean;
    } else if (all_int) {
      col.kind = col.missing_count > 0 ? ColumnKind::kFloat : ColumnKind::kInteger;
    } else if (all_numeric) {
      col.kind = ColumnKind::kFloat;
    } else {
      col.kind = ColumnKind::kText;
    }
    schema.push_back(std::move(col));
  }
  return schema;
}

Dataset LoadDatasetFromText(std::string_view csv_text, const ManifestEntry& entry) {
  auto records = ParseCsv(csv_text);
  if (records.empty()) throw Error(ErrorKind::kEmptyDataset, "dataset '" + entry.id + "' has no header");
  const auto names = CleanHeader(records.front());
  if (records.size() == 1) {
    throw Error(ErrorKind::kEmptyDataset, "dataset '" + entry.id + "' has no data rows");
  }
  Dataset d;
  d.id = entry.id;
  d.rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& rec = records[r];
    if (rec.size() != names.size()) {
      throw Error(ErrorKind::kParse, "dataset '" + entry.id + "' row " + std::to_string(r) + " has " +
                                         std::to_string(rec.size()) + " fields, header has " +
                                         std::to_string(names.size()));
    }
    Row row;
    row.id = r - 1;
    row.cells.reserve(rec.size());
    for (auto& raw : rec) {
      if (IsMissingToken(raw)) {
        row.cells.emplace_back(std::nullopt);
      } else {
        row.cells.emplace_back(std::move(raw));
      }
    }
    d.rows.push_back(std::move(row));
  }
  d.columns = InferSchema(names, d.rows);
  if (entry.target_column) {
    auto match = MatchColumn(*entry.target_column, names);
    if (!match) {
      throw Error(ErrorKind::kNotFound, "dataset '" + entry.id + "': target column '" +
                                            *entry.target_column + "' not in header");
    }
    d.target_column = *match;
  }
  return d;
}

Dataset LoadDataset(const std::string& path, const ManifestEntry& entry) {
  Dataset d = LoadDatasetFromText(ReadFile(path), entry);
  if (entry.metadata_path) d.raw_metadata = ReadFile(*entry.metadata_path);
  return d;
}

Manifest ParseManifest(std::string_view json_text, const std::string& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("manifest is not valid JSON: ") + e.what());
  }
  Manifest manifest;
  const nlohmann::json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("datasets")) throw Error(ErrorKind::kParse, "manifest object needs a 'datasets' array");
    list = &doc["datasets"];
    if (doc.contains("fewshot_max_rows")) manifest.fewshot_max_rows = doc["fewshot_max_rows"].get<std::size_t>();
  }
  if (!list->is_array()) throw Error(ErrorKind::kParse, "manifest datasets must be an array");
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base_dir.empty()) path = std::filesystem::path(base_dir) / path;
    return path.lexically_normal().string();
  };
  std::set<std::string> ids;
  for (const auto& item : *list) {
    if (!item.is_object() || !item.contains("id") || !item.contains("path")) {
      throw Error(ErrorKind::kParse, "manifest entry needs 'id' and 'path'");
    }
    ManifestEntry e;
    e.id = item["id"].get<std::string>();
    e.path = resolve(item["path"].get<std::string>());
    if (item.contains("target_column") && !item["target_column"].is_null()) {
      e.target_column = item["target_column"].get<std::string>();
    }
    if (item.contains("metadata_path") && !item["metadata_path"].is_null()) {
      e.metadata_path = resolve(item["metadata_path"].get<std::string>());
    }
    if (!ids.insert(e.id).second) throw Error(ErrorKind::kParse, "duplicate dataset id '" + e.id + "'");
    manifest.entries.push_back(std::move(e));
  }
  return manifest;
}

Manifest LoadManifest(const std::string& path) {
  return ParseManifest(ReadFile(path), std::filesystem::path(path).parent_path().string());
}

std::size_t SeededRng::Below(std::size_t bound) {
  if (bound == 0) throw Error(ErrorKind::kInvalidArgument, "Below(0)");
  const std::uint64_t b = bound;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % b;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % b);
}

double SeededRng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::Normal() {
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<std::size_t> Permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  SeededRng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.Below(i)]);
  }
  return perm;
}

namespace {

Dataset WithRows(const Dataset& d, std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());
  Dataset out;
  out.id = d.id;
  out.raw_metadata = d.raw_metadata;
  out.columns = d.columns;
  out.target_column = d.target_column;
  out.rows.reserve(indices.size());
  for (std::size_t i : indices) out.rows.push_back(d.rows[i]);
  return out;
}

}  // namespace

Dataset ApplyCutoff(const Dataset& d, std::size_t max_rows, std::uint64_t seed) {
  if (max_rows < 1) throw Error(ErrorKind::kInvalidArgument, "cutoff must be at least 1");
  if (d.rows.size() <= max_rows) return d;
  auto perm = Permutation(d.rows.size(), seed);
  perm.resize(max_rows);
  return WithRows(d, std::move(perm));
}

std::size_t TrainCount(std::size_t n, double train_ratio) {
  const auto raw = static_cast<long long>(std::llround(train_ratio * static_cast<double>(n)));
  return static_cast<std::size_t>(std::clamp<long long>(raw, 1, static_cast<long long>(n) - 1));
}

std::pair<Dataset, Dataset> Split(const Dataset& d, const SplitSpec& spec) {
  if (!(spec.train_ratio > 0.0 && spec.train_ratio < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "train ratio must lie in (0, 1)");
  }
  if (d.rows.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "dataset '" + d.id + "' needs at least 2 rows to split");
  }
  const auto perm = Permutation(d.rows.size(), spec.seed);
  const std::size_t n_train = TrainCount(d.rows.size(), spec.train_ratio);
  std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
  return {WithRows(d, std::move(train)), WithRows(d, std::move(test))};
}

TargetKind DetectTargetKind(const Dataset& d) {
  const std::size_t t = d.TargetIndex();
  const ColumnSchema& schema = d.columns[t];
  std::vector<std::string> labels;
  std::unordered_set<std::string> seen;
  bool all_integral = true;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Row& row : d.rows) {
    const Cell& cell = row.cells[t];
    if (!cell) continue;
    std::string label = RenderValue(cell, schema);
    if (seen.insert(label).second) labels.push_back(label);
    if (schema.kind == ColumnKind::kInteger || schema.kind == ColumnKind::kFloat) {
      const double v = *ParseDouble(*cell);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (v != std::floor(v)) all_integral = false;
    }
  }
  if (labels.empty()) {
    throw Error(ErrorKind::kDegenerate, "target column '" + schema.name + "' is entirely missing");
  }
  bool discrete = false;
  switch (schema.kind) {
    case ColumnKind::kText:
    case ColumnKind::kBoolean: discrete = true; break;
    case ColumnKind::kInteger: discrete = labels.size() <= kDiscreteThreshold; break;
    case ColumnKind::kFloat:
      discrete = all_integral && labels.size() <= kDiscreteThreshold;
      break;
  }
  if (discrete) {
    if (labels.size() < 2) {
      throw Error(ErrorKind::kDegenerate, "target column '" + schema.name + "' has a single label");
    }
    return DiscreteTarget{std::move(labels)};
  }
  if (!(lo < hi)) throw Error(ErrorKind::kDegenerate, "target column '" + schema.name + "' is constant");
  return ContinuousTarget{lo, hi};
}

std::string NormalizeTargetName(std::string_view name) {
  std::string out;
  bool pending_space = false;
  for (char c : name) {
    if (c == ' ' || c == '_' || c == '-') {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::optional<std::string> MatchColumn(std::string_view name,
                                       const std::vector<std::string>& columns) {
  for (const auto& c : columns) {
    if (c == name) return c;
  }
  const std::string wanted = NormalizeTargetName(name);
  std::optional<std::string> found;
  for (const auto& c : columns) {
    if (NormalizeTargetName(c) == wanted) {
      if (found) return std::nullopt;  // ambiguous
      found = c;
    }
  }
  return found;
}

Dataset DropMissingTargets(const Dataset& d) {
  const std::size_t t = d.TargetIndex();
  Dataset out = d;
  std::erase_if(out.rows, [t](const Row& r) { return !r.cells[t].has_value(); });
  return out;
}

}  // namespace tabprompt
