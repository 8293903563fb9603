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

#include "synthetic.hpp"
#include "tabprompt/ingest.hpp"
#include "tabprompt/serializer.hpp"
#include "tabprompt/text.hpp"

using namespace tabprompt;
using tabprompt::testing::FixturePath;

namespace {

std::string FirstRow(const std::string& csv, const std::string& target) {
  const Dataset d = LoadDataset(FixturePath("csv/" + csv), ManifestEntry{csv, "", target, {}});
  return SerializeFeatures(d.rows.front(), d);
}

std::size_t Count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("golden listings") {
  CHECK(FirstRow("netflix.csv", "Subscription Type") == ReadFile(FixturePath("golden/features_netflix.txt")));
  CHECK(FirstRow("amazon.csv", "overall") == ReadFile(FixturePath("golden/features_amazon.txt")));
  CHECK(FirstRow("diabetes.csv", "Outcome") == ReadFile(FixturePath("golden/features_diabetes.txt")));
}

TEST_CASE("column names") {
  CHECK(NormalizeColumnName("day_diff") == "day diff");
  CHECK(NormalizeColumnName("Age") == "Age");
  CHECK(NormalizeColumnName("score_pos_neg_diff") == "score pos neg diff");
  CHECK(NormalizeColumnName("a-b_c") == "a b c");
}

TEST_CASE("value rendering follows the column kind") {
  const ColumnSchema integer{"i", ColumnKind::kInteger, 0};
  const ColumnSchema real{"f", ColumnKind::kFloat, 0};
  const ColumnSchema text{"t", ColumnKind::kText, 0};
  CHECK(RenderValue(std::string("1448"), integer) == "1448");
  CHECK(RenderValue(std::string("6"), real) == "6.0");
  CHECK(RenderValue(std::string("0.43"), real) == "0.43");
  CHECK(RenderValue(std::string("0.1234567"), real) == "0.123457");
  CHECK(RenderValue(std::string(" United States"), text) == " United States");
  CHECK(RenderValue(std::nullopt, real) == "N/A");
}

TEST_CASE("singleton feature") {
  const Dataset d = LoadDatasetFromText("a,y\nx,1\n", ManifestEntry{"s", "", "y", {}});
  CHECK(SerializeFeatures(d.rows[0], d) == "a is x.\n");
}

TEST_CASE("target never serialized, separator count matches") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset d = tabprompt::testing::SyntheticDataset({.rows = 30, .missing_rate = 0.1, .seed = seed});
    for (const Row& r : d.rows) {
      const std::string s = SerializeFeatures(r, d);
      CHECK(s.ends_with(".\n"));
      CHECK(Count(s, "; ") == d.columns.size() - 2);
      CHECK(s.find("label is") == std::string::npos);
    }
  }
}

TEST_CASE("rows differing in a text cell serialize differently") {
  const Dataset d = LoadDatasetFromText("a,b,y\nx,1,0\nz,1,0\nx,2,1\n", ManifestEntry{"s", "", "y", {}});
  CHECK(SerializeFeatures(d.rows[0], d) != SerializeFeatures(d.rows[1], d));
  CHECK(SerializeFeatures(d.rows[0], d) != SerializeFeatures(d.rows[2], d));
}
