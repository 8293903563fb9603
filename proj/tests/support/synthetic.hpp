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
#include <memory>
#include <string>

#include "tabprompt/ingest.hpp"
#include "tabprompt/pipeline.hpp"

namespace tabprompt::testing {

struct SyntheticSpec {
  std::string id = "synthetic";
  std::size_t rows = 100;
  std::size_t numeric_features = 3;
  bool categorical_feature = true;
  int classes = 3;
  double noise = 0.6;  // relative to the unit spacing between class centers
  double missing_rate = 0.0;
  std::uint64_t seed = 1;
};

// CSV text with numeric features x1.., an optional categorical "color"
// column and a text "label" target whose class shifts the feature means.
std::string SyntheticCsv(const SyntheticSpec& spec);

// SyntheticCsv loaded with "label" as target.
Dataset SyntheticDataset(const SyntheticSpec& spec);

// Prepared with offline metadata and no cutoff.
std::shared_ptr<const PreparedDataset> SyntheticPrepared(const SyntheticSpec& spec);

// Reads a fixture relative to the fixture root.
std::string FixturePath(const std::string& relative);

}  // namespace tabprompt::testing
