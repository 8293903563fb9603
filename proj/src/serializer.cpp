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

#include "tabprompt/serializer.hpp"

#include "tabprompt/text.hpp"

namespace tabprompt {

std::string NormalizeColumnName(std::string_view name) {
  std::string out(name);
  for (char& c : out) {
    if (c == '-' || c == '_') c = ' ';
  }
  return out;
}

std::string RenderValue(const Cell& cell, const ColumnSchema& schema,
                        const SerializationConfig& cfg) {
  if (!cell) return cfg.missing_marker;
  switch (schema.kind) {
    case ColumnKind::kInteger:
      if (auto v = ParseInt64(*cell)) return std::to_string(*v);
      return *cell;
    case ColumnKind::kFloat:
      if (auto v = ParseDouble(*cell)) {
        return FormatDecimal(*v, cfg.float_precision, cfg.min_float_decimals);
      }
      return *cell;
    case ColumnKind::kText:
    case ColumnKind::kBoolean:
      return *cell;
  }
  return *cell;
}

std::string SerializeFeatures(const Row& row, const Dataset& d, const SerializationConfig& cfg) {
  const std::size_t target = d.TargetIndex();
  std::string out;
  bool first = true;
  for (std::size_t c = 0; c < d.columns.size(); ++c) {
    if (c == target) continue;
    if (!first) out += cfg.pair_separator;
    first = false;
    out += NormalizeColumnName(d.columns[c].name);
    out += " is ";
    out += RenderValue(row.cells[c], d.columns[c], cfg);
  }
  out += cfg.terminator;
  return out;
}

}  // namespace tabprompt
