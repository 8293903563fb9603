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

#include "tabprompt/outparse.hpp"

#include <algorithm>
#include <regex>
#include <string>

#include "tabprompt/text.hpp"

namespace tabprompt {

std::string_view ParseStatusName(ParseStatus status) {
  switch (status) {
    case ParseStatus::kOk: return "ok";
    case ParseStatus::kTruncated: return "truncated";
    case ParseStatus::kFailed: return "failed";
  }
  return "failed";
}

std::vector<double> ExtractProbs(std::string_view text) {
  static const std::regex kNumber("[0-9]*[.][0-9]+");
  std::vector<double> out;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kNumber); it != std::sregex_iterator(); ++it) {
    if (auto v = ParseDouble(it->str())) out.push_back(*v);
  }
  return out;
}

ParsedPrediction MapToClass(std::span<const double> probs, int expected_classes) {
  ParsedPrediction out;
  const auto n = static_cast<int>(probs.size());
  if (n == 0 || expected_classes <= 0 || n > expected_classes) return out;
  out.probs.assign(probs.begin(), probs.end());
  out.predicted_class =
      static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
  out.status = n == expected_classes ? ParseStatus::kOk : ParseStatus::kTruncated;
  return out;
}

int MatchClassLiteral(std::string_view text, int num_classes) {
  static const std::regex kClass("class ([0-9]+)");
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kClass); it != std::sregex_iterator(); ++it) {
    const auto t = ParseInt64((*it)[1].str());
    if (t && *t >= 0 && *t < num_classes) return static_cast<int>(*t);
  }
  return -1;
}

}  // namespace tabprompt
