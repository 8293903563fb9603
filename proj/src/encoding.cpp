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

#include "tabprompt/encoding.hpp"

#include <limits>

#include "tabprompt/text.hpp"

namespace tabprompt {

OrdinalEncoder OrdinalEncoder::Fit(const Dataset& train) {
  const std::size_t target = train.TargetIndex();
  std::vector<ColumnCoding> columns;
  for (std::size_t c = 0; c < train.columns.size(); ++c) {
    if (c == target) continue;
    ColumnCoding coding;
    coding.name = train.columns[c].name;
    coding.source_index = c;
    const ColumnKind kind = train.columns[c].kind;
    coding.categorical = kind == ColumnKind::kText || kind == ColumnKind::kBoolean;
    if (coding.categorical) {
      std::map<std::string, std::size_t> seen;
      for (const Row& row : train.rows) {
        const Cell& cell = row.cells[c];
        if (cell && seen.emplace(*cell, coding.categories.size()).second) {
          coding.categories.push_back(*cell);
        }
      }
    }
    columns.push_back(std::move(coding));
  }
  return FromColumns(std::move(columns));
}

OrdinalEncoder OrdinalEncoder::FromColumns(std::vector<ColumnCoding> columns) {
  OrdinalEncoder enc;
  enc.columns_ = std::move(columns);
  enc.lookup_.resize(enc.columns_.size());
  for (std::size_t i = 0; i < enc.columns_.size(); ++i) {
    const auto& cats = enc.columns_[i].categories;
    for (std::size_t k = 0; k < cats.size(); ++k) enc.lookup_[i].emplace(cats[k], k);
  }
  return enc;
}

std::vector<double> OrdinalEncoder::Transform(const Row& row) const {
  std::vector<double> out;
  out.reserve(columns_.size());
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const ColumnCoding& coding = columns_[i];
    const Cell& cell = row.cells.at(coding.source_index);
    if (coding.categorical) {
      if (!cell) {
        out.push_back(coding.MissingCode());
      } else if (auto it = lookup_[i].find(*cell); it != lookup_[i].end()) {
        out.push_back(static_cast<double>(it->second));
      } else {
        out.push_back(coding.UnseenCode());
      }
      continue;
    }
    const auto v = cell ? ParseDouble(*cell) : std::nullopt;
    out.push_back(v ? *v : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

Matrix OrdinalEncoder::Transform(const std::vector<Row>& rows) const {
  Matrix out;
  out.reserve(rows.size());
  for (const Row& r : rows) out.push_back(Transform(r));
  return out;
}

}  // namespace tabprompt
