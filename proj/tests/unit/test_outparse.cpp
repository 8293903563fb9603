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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tabprompt/outparse.hpp"

using namespace tabprompt;

TEST_CASE("extraction keeps every decimal in order") {
  CHECK(ExtractProbs("class 0: 0.32; class 1: 0.39; class 2: 0.29.") == std::vector<double>{0.32, 0.39, 0.29});
  CHECK(ExtractProbs("no numbers here").empty());
  CHECK(ExtractProbs("integers 1 2 3 are ignored, .5 is not") == std::vector<double>{0.5});
  CHECK(ExtractProbs("12.25 and 0.0") == std::vector<double>{12.25, 0.0});
}

TEST_CASE("documented example") {
  const auto p = ParseGeneration("class 0: 0.32; class 1: 0.39; class 2: 0.29.", 3);
  CHECK(p.status == ParseStatus::kOk);
  CHECK(p.predicted_class == 1);
  CHECK(p.probs == std::vector<double>{0.32, 0.39, 0.29});
}

TEST_CASE("truncated and failed generations") {
  auto p = ParseGeneration("class 0: 0.2; class 1: 0.7; class 2:", 3);
  CHECK(p.status == ParseStatus::kTruncated);
  CHECK(p.predicted_class == 1);
  p = ParseGeneration("", 3);
  CHECK(p.status == ParseStatus::kFailed);
  CHECK(p.predicted_class == -1);
  p = ParseGeneration("class 0: 0.1; class 1: 0.2; class 2: 0.3; class 3: 0.4.", 3);
  CHECK(p.status == ParseStatus::kFailed);
  CHECK(ParseGeneration("0.5 0.5", 0).status == ParseStatus::kFailed);
}

TEST_CASE("ties pick the first maximum") {
  CHECK(ParseGeneration("0.5 0.5", 2).predicted_class == 0);
  CHECK(ParseGeneration("0.1 0.45 0.45", 3).predicted_class == 1);
}

TEST_CASE("status names") {
  CHECK(ParseStatusName(ParseStatus::kOk) == "ok");
  CHECK(ParseStatusName(ParseStatus::kTruncated) == "truncated");
  CHECK(ParseStatusName(ParseStatus::kFailed) == "failed");
}

TEST_CASE("class literals") {
  CHECK(MatchClassLiteral("the answer is class 2", 3) == 2);
  CHECK(MatchClassLiteral("class 7 then class 1", 3) == 1);
  CHECK(MatchClassLiteral("nothing", 3) == -1);
}
