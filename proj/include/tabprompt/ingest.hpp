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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tabprompt/error.hpp"

namespace tabprompt {

enum class ColumnKind { kInteger, kFloat, kText, kBoolean };

std::string_view ColumnKindName(ColumnKind kind);

// A missing cell is std::nullopt; present cells keep their raw text.
using Cell = std::optional<std::string>;

struct Row {
  // Position of the row in the source file (0-based, header excluded).
  std::size_t id = 0;
  std::vector<Cell> cells;

  bool operator==(const Row&) const = default;
};

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::kText;
  std::size_t missing_count = 0;

  bool operator==(const ColumnSchema&) const = default;
};

struct Dataset {
  std::string id;
  std::string raw_metadata;
  std::vector<ColumnSchema> columns;
  std::vector<Row> rows;
  std::optional<std::string> target_column;

  // Index of `name` in `columns`; throws kNotFound.
  std::size_t ColumnIndex(std::string_view name) const;
  std::size_t TargetIndex() const;
  std::vector<std::string> ColumnNames() const;

  bool operator==(const Dataset&) const = default;
};

struct DiscreteTarget {
  // Distinct labels in order of first appearance.
  std::vector<std::string> labels;
};

struct ContinuousTarget {
  double min = 0.0;
  double max = 0.0;
};

using TargetKind = std::variant<DiscreteTarget, ContinuousTarget>;

struct SplitSpec {
  double train_ratio = 0.9;
  std::uint64_t seed = 0;
};

struct ManifestEntry {
  std::string id;
  std::string path;
  std::optional<std::string> target_column;
  std::optional<std::string> metadata_path;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  // Datasets with more rows than this are skipped by few-shot sweeps.
  std::optional<std::size_t> fewshot_max_rows;
};

// Distinct-value bound under which integer targets count as discrete.
inline constexpr std::size_t kDiscreteThreshold = 20;
inline constexpr std::size_t kDefaultCutoff = 7500;

// Parses comma-separated text with a header row. Quoted fields follow the
// usual doubling convention for embedded quotes.
std::vector<std::vector<std::string>> ParseCsv(std::string_view text);

bool IsMissingToken(std::string_view raw);

// Infers per-column kinds from the cells. Integer columns that contain a
// missing cell are promoted to float.
std::vector<ColumnSchema> InferSchema(const std::vector<std::string>& names,
                                      const std::vector<Row>& rows);

Dataset LoadDataset(const std::string& path, const ManifestEntry& entry);
Dataset LoadDatasetFromText(std::string_view csv_text, const ManifestEntry& entry);

// Relative paths inside the manifest resolve against the manifest directory.
Manifest LoadManifest(const std::string& path);
Manifest ParseManifest(std::string_view json_text, const std::string& base_dir);

Dataset ApplyCutoff(const Dataset& d, std::size_t max_rows, std::uint64_t seed);

std::pair<Dataset, Dataset> Split(const Dataset& d, const SplitSpec& spec);

// Number of training rows Split() produces for `n` rows.
std::size_t TrainCount(std::size_t n, double train_ratio);

TargetKind DetectTargetKind(const Dataset& d);

// Lowercase and collapse runs of space/underscore/hyphen into one space.
std::string NormalizeTargetName(std::string_view name);

// The column whose normalized name equals the normalized `name`; an exact
// match wins over a normalized one.
std::optional<std::string> MatchColumn(std::string_view name,
                                       const std::vector<std::string>& columns);

// Drops rows whose target cell is missing.
Dataset DropMissingTargets(const Dataset& d);

// std::mt19937_64 is fully specified; the standard distributions are not, so
// bounded draws are done here to keep outputs identical across toolchains.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t Next() { return engine_(); }
  std::size_t Below(std::size_t bound);
  double Uniform();  // [0, 1)
  double Normal();

 private:
  std::mt19937_64 engine_;
};

// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> Permutation(std::size_t n, std::uint64_t seed);

}  // namespace tabprompt
