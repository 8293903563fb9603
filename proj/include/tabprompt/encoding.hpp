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
#include <map>
#include <string>
#include <vector>

#include "tabprompt/ingest.hpp"

namespace tabprompt {

using Matrix = std::vector<std::vector<double>>;

// Ordinal encoder over the feature (non-target) columns of a dataset.
// Categorical columns code values by first appearance; unseen values map to
// |seen| and missing values to |seen| + 1. Numeric columns pass through with
// missing cells as NaN.
class OrdinalEncoder {
 public:
  struct ColumnCoding {
    std::string name;
    std::size_t source_index = 0;
    bool categorical = false;
    std::vector<std::string> categories;  // first-appearance order

    double UnseenCode() const { return static_cast<double>(categories.size()); }
    double MissingCode() const { return static_cast<double>(categories.size() + 1); }
  };

  static OrdinalEncoder Fit(const Dataset& train);

  std::vector<double> Transform(const Row& row) const;
  Matrix Transform(const std::vector<Row>& rows) const;

  std::size_t num_features() const { return columns_.size(); }
  const std::vector<ColumnCoding>& columns() const { return columns_; }

  static OrdinalEncoder FromColumns(std::vector<ColumnCoding> columns);

 private:
  std::vector<ColumnCoding> columns_;
  std::vector<std::map<std::string, std::size_t>> lookup_;
};

}  // namespace tabprompt
