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

#include "json.hpp"
#include "synthetic.hpp"
#include "tabprompt/error.hpp"
#include "tabprompt/model_io.hpp"

using namespace tabprompt;
using nlohmann::json;

TEST_CASE("target spaces round trip") {
  const std::vector<std::string> labels = {"a", "b"};
  const TargetSpace discrete = OneHotSpace(labels);
  CHECK(TargetSpaceFromJson(ToJson(discrete)) == discrete);
  const TargetSpace binned = BinContinuous(std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(TargetSpaceFromJson(json::parse(ToJson(binned).dump())) == binned);
}

TEST_CASE("ensemble round trip preserves predictions") {
  auto split = MakeSplit(testing::SyntheticPrepared({.rows = 80, .missing_rate = 0.1}), SplitSpec{0.75, 2});
  FitSplitModel(split, BoostingParams{.rounds = 20});
  const PersistedEnsemble p{split.dataset->space, split.encoder, *split.model};
  const std::string text = EnsembleToJson(p).dump();
  const auto back = EnsembleFromJson(json::parse(text));
  CHECK(back.space == p.space);
  CHECK(EnsembleToJson(back).dump() == text);
  for (const Row& r : split.test.rows) {
    const auto x = back.encoder.Transform(r);
    CHECK(x.size() == split.encoder.Transform(r).size());
    CHECK(back.model.PredictProba(x) == split.model->PredictProba(split.encoder.Transform(r)));
  }
}

TEST_CASE("mlp round trip") {
  const Matrix x = {{0, 1}, {1, 0}, {2, 2}, {3, 1}};
  const MlpModel m = FitMlp(x, std::vector<int>{0, 1, 0, 1}, 2, MlpParams{.hidden = 5, .epochs = 5});
  PersistedMlp p{OneHotSpace(std::vector<std::string>{"n", "y"}), OrdinalEncoder{}, m};
  const auto back = MlpFromJson(json::parse(MlpToJson(p).dump()));
  for (const auto& row : x) CHECK(MlpProba(back.model, row) == MlpProba(m, row));
}

TEST_CASE("bad documents are parse errors") {
  auto kind = [](const json& j) {
    try {
      EnsembleFromJson(j);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kIo;
  };
  CHECK(kind(json::object()) == ErrorKind::kParse);
  CHECK(kind(json{{"schema", "tabprompt.mlp/1"}}) == ErrorKind::kParse);
  CHECK(kind(json{{"schema", kTreeEnsembleSchema}, {"space", 3}}) == ErrorKind::kParse);
  try {
    MlpFromJson(json{{"schema", kMlpSchema}});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
  }
}
