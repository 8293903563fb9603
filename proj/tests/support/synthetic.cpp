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

#include "synthetic.hpp"

#include <vector>

#include "tabprompt/metadata.hpp"
#include "tabprompt/text.hpp"

namespace tabprompt::testing {

std::string SyntheticCsv(const SyntheticSpec& spec) {
  static const char* kColors[] = {"red", "green", "blue", "amber"};
  SeededRng rng(spec.seed);
  std::string out;
  for (std::size_t j = 0; j < spec.numeric_features; ++j) out += "x" + std::to_string(j + 1) + ",";
  if (spec.categorical_feature) out += "color,";
  out += "label\n";
  for (std::size_t r = 0; r < spec.rows; ++r) {
    const int c = static_cast<int>(rng.Below(static_cast<std::size_t>(spec.classes)));
    for (std::size_t j = 0; j < spec.numeric_features; ++j) {
      const double center = j == 0 ? c : (j % 2 ? -c : 0.5 * c);
      const double v = center + spec.noise * rng.Normal();
      if (spec.missing_rate > 0.0 && rng.Uniform() < spec.missing_rate) {
        out += ",";
      } else {
        out += FormatDecimal(v, 4, 1) + ",";
      }
    }
    if (spec.categorical_feature) {
      const bool informative = rng.Uniform() < 0.7;
      out += std::string(kColors[informative ? c % 4 : rng.Below(4)]) + ",";
    }
    out += "class_" + std::string(1, static_cast<char>('A' + c)) + "\n";
  }
  return out;
}

Dataset SyntheticDataset(const SyntheticSpec& spec) {
  return LoadDatasetFromText(SyntheticCsv(spec), ManifestEntry{spec.id, "", "label", std::nullopt});
}

std::shared_ptr<const PreparedDataset> SyntheticPrepared(const SyntheticSpec& spec) {
  const Dataset d = SyntheticDataset(spec);
  return PrepareDataset(d, FallbackReformat(d), MetadataSource::kFallback, PrepareOptions{});
}

std::string FixturePath(const std::string& relative) {
  return std::string(TABPROMPT_FIXTURE_DIR) + "/" + relative;
}

}  // namespace tabprompt::testing
