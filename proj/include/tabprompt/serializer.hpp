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

#include <string>
#include <string_view>

#include "tabprompt/ingest.hpp"

namespace tabprompt {

struct SerializationConfig {
  int float_precision = 6;
  int min_float_decimals = 1;
  std::string pair_separator = "; ";
  std::string terminator = ".\n";
  std::string missing_marker = "N/A";
};

// Hyphens and underscores become spaces; everything else is kept.
std::string NormalizeColumnName(std::string_view name);

std::string RenderValue(const Cell& cell, const ColumnSchema& schema,
                        const SerializationConfig& cfg = {});

// "{name} is {value}" over every non-target column in schema order.
std::string SerializeFeatures(const Row& row, const Dataset& d,
                              const SerializationConfig& cfg = {});

}  // namespace tabprompt
