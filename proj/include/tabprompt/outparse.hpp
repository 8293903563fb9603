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

#include <span>
#include <string_view>
#include <vector>

namespace tabprompt {

enum class ParseStatus { kOk, kTruncated, kFailed };

std::string_view ParseStatusName(ParseStatus status);

struct ParsedPrediction {
  std::vector<double> probs;
  int predicted_class = -1;  // -1 when status is kFailed
  ParseStatus status = ParseStatus::kFailed;
};

// Every match of [0-9]*[.][0-9]+ in order of occurrence.
std::vector<double> ExtractProbs(std::string_view text);

ParsedPrediction MapToClass(std::span<const double> probs, int expected_classes);

inline ParsedPrediction ParseGeneration(std::string_view text, int expected_classes) {
  return MapToClass(ExtractProbs(text), expected_classes);
}

// First "class {t}" with t < num_classes, for label-style generations.
int MatchClassLiteral(std::string_view text, int num_classes);

}  // namespace tabprompt
