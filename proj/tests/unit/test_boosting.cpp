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

#include <cmath>
#include <limits>

#include "tabprompt/augmentor.hpp"
#include "tabprompt/boosting.hpp"
#include "tabprompt/error.hpp"
#include "tabprompt/ingest.hpp"

using namespace tabprompt;

namespace {

void Xor(Matrix& x, std::vector<int>& y, int copies) {
  for (int c = 0; c < copies; ++c) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        x.push_back({static_cast<double>(a), static_cast<double>(b)});
        y.push_back(a ^ b);
      }
    }
  }
}

double Accuracy(const Booster& b, const Matrix& x, const std::vector<int>& y) {
  int ok = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto p = b.PredictProba(x[i]);
    ok += ArgMax(p) == y[i];
  }
  return static_cast<double>(ok) / static_cast<double>(x.size());
}

}  // namespace

TEST_CASE("softmax") {
  const auto p = Softmax(std::vector<double>{1000.0, 1000.0});
  CHECK(p[0] == doctest::Approx(0.5));
  const auto q = Softmax(std::vector<double>{0.0, std::log(3.0)});
  CHECK(q[1] == doctest::Approx(0.75));
}

TEST_CASE("xor needs depth two and is solved") {
  Matrix x;
  std::vector<int> y;
  Xor(x, y, 5);
  const Booster b = Booster::Fit(x, y, 2, BoostingParams{});
  CHECK(Accuracy(b, x, y) == 1.0);
  // Balanced nodes keep splitting after round-off creeps into the sums.
  CHECK(b.PredictProba(x[1])[1] > 0.85);
  CHECK(b.trees().size() == 200);
  for (const auto& t : b.trees()) CHECK(t.depth() <= 6);
}

TEST_CASE("training loss never increases") {
  SeededRng rng(3);
  Matrix x;
  std::vector<int> y;
  for (int i = 0; i < 300; ++i) {
    const double a = rng.Normal(), b = rng.Normal();
    x.push_back({a, b, rng.Uniform()});
    y.push_back(a + 0.5 * b + 0.3 * rng.Normal() > 0 ? (a > 1 ? 2 : 1) : 0);
  }
  std::vector<double> trace;
  const Booster booster = Booster::Fit(x, y, 3, BoostingParams{}, &trace);
  REQUIRE(trace.size() == 101);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
  CHECK(trace.back() == doctest::Approx(MeanLogLoss(booster, x, y)));
}

TEST_CASE("missing values go left") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Matrix x = {{nan}, {nan}, {nan}, {1.0}, {2.0}, {3.0}};
  std::vector<int> y = {0, 0, 0, 1, 1, 1};
  const Booster b = Booster::Fit(x, y, 2, BoostingParams{10, 2, 0.3, 1.0, 1.0});
  CHECK(Accuracy(b, x, y) == 1.0);
  CHECK(ArgMax(b.PredictProba(std::vector<double>{nan})) == 0);
}

TEST_CASE("depth limit is respected") {
  SeededRng rng(8);
  Matrix x;
  std::vector<int> y;
  for (int i = 0; i < 200; ++i) {
    x.push_back({rng.Uniform(), rng.Uniform()});
    y.push_back(static_cast<int>(rng.Below(2)));
  }
  const Booster b = Booster::Fit(x, y, 2, BoostingParams{5, 2, 0.3, 1.0, 1.0});
  for (const auto& t : b.trees()) CHECK(t.depth() <= 2);
}

TEST_CASE("input validation") {
  Matrix x = {{1.0}, {2.0}};
  CHECK_THROWS_AS(Booster::Fit(x, std::vector<int>{0, 0}, 0, {}), Error);
  CHECK_THROWS_AS(Booster::Fit(x, std::vector<int>{0, 2}, 2, {}), Error);
  CHECK_THROWS_AS(Booster::Fit(Matrix{}, std::vector<int>{}, 2, {}), Error);
  CHECK_THROWS_AS(Booster::Fit(x, std::vector<int>{0}, 2, {}), Error);
}

TEST_CASE("fitting is deterministic") {
  Matrix x;
  std::vector<int> y;
  Xor(x, y, 3);
  const Booster a = Booster::Fit(x, y, 2, {});
  const Booster b = Booster::Fit(x, y, 2, {});
  REQUIRE(a.trees().size() == b.trees().size());
  for (std::size_t i = 0; i < a.trees().size(); ++i) {
    CHECK(a.trees()[i].value == b.trees()[i].value);
    CHECK(a.trees()[i].threshold == b.trees()[i].threshold);
  }
}
