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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "synthetic.hpp"
#include "tabprompt/augmentor.hpp"
#include "tabprompt/error.hpp"
#include "tabprompt/outparse.hpp"

using namespace tabprompt;

namespace {

double Sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

ErrorKind KindOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kInvalidArgument;
}

}  // namespace

TEST_CASE("percentiles interpolate linearly") {
  const std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8};
  CHECK(Percentile(v, 0.25) == doctest::Approx(2.75));
  CHECK(Percentile(v, 0.5) == doctest::Approx(4.5));
  CHECK(Percentile(v, 0.75) == doctest::Approx(6.25));
  CHECK(Percentile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
}

TEST_CASE("quartile bins") {
  const std::vector<double> v = {1, 2, 3, 4, 5, 6, 7, 8};
  const TargetSpace s = BinContinuous(v);
  REQUIRE(s.size() == 4);
  CHECK(s.binned());
  CHECK(s.classes[0].label == "<2.75");
  CHECK(s.classes[1].label == "2.75 - 4.5");
  CHECK(s.classes[2].label == "4.5 - 6.25");
  CHECK(s.classes[3].label == ">6.25");
  const ColumnSchema real{"y", ColumnKind::kFloat, 0};
  CHECK(s.ClassOf(std::string("1"), real) == 0);
  CHECK(s.ClassOf(std::string("2.75"), real) == 1);
  CHECK(s.ClassOf(std::string("6.25"), real) == 2);
  CHECK(s.ClassOf(std::string("8"), real) == 3);
  CHECK_FALSE(s.ClassOf(std::nullopt, real));
  CHECK(KindOf([] { BinContinuous(std::vector<double>{5, 5, 5, 5}); }) == ErrorKind::kDegenerate);
}

TEST_CASE("bins on charge-like values render like the serializer") {
  std::vector<double> v;
  for (int i = 0; i < 101; ++i) v.push_back(1121.0 + i * 626.49);
  const TargetSpace s = BinContinuous(v);
  CHECK(s.classes[0].label == "<16783.25");
  CHECK(s.classes[3].label == ">48107.75");
}

TEST_CASE("one-hot space follows first appearance") {
  const std::vector<std::string> labels = {"Standard", "Premium", "Basic", "Premium"};
  const TargetSpace s = OneHotSpace(labels);
  REQUIRE(s.size() == 3);
  CHECK(s.classes[0].label == "Standard");
  CHECK(s.classes[2].explanation == "Basic");
  CHECK(SerializeClass(s) ==
        R"(class 0 stands for "Standard"; class 1 stands for "Premium"; class 2 stands for "Basic")");
  const std::vector<std::string> permuted = {"Basic", "Standard", "Premium"};
  const TargetSpace p = OneHotSpace(permuted);
  CHECK(p.classes[0].label == "Basic");
  CHECK(KindOf([] { OneHotSpace(std::vector<std::string>{"a", "a"}); }) == ErrorKind::kDegenerate);
}

TEST_CASE("explanations") {
  const std::vector<std::string> labels = {"0", "1"};
  const std::vector<std::string> expl = {"healthy", "diabetic"};
  const TargetSpace s = OneHotSpace(labels, expl);
  CHECK(SerializeClass(s) == R"(class 0 stands for "healthy"; class 1 stands for "diabetic")");
}

TEST_CASE("augment examples") {
  auto a = AugmentProbabilities(std::vector<double>{0.32, 0.39, 0.29}, 1);
  CHECK(a.probs == std::vector<double>{0.32, 0.39, 0.29});
  a = AugmentProbabilities(std::vector<double>{0.6, 0.4}, 1);
  CHECK(a.probs == std::vector<double>{0.4, 0.6});
  a = AugmentProbabilities(std::vector<double>{0.5, 0.3, 0.2}, 2);
  CHECK(a.probs == std::vector<double>{0.2, 0.3, 0.5});
  CHECK(KindOf([] { AugmentProbabilities(std::vector<double>{0.5, 0.5}, 2); }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("ties and rounding keep the true class on top") {
  // Equal entries: the true class must still be the first max.
  auto a = AugmentProbabilities(std::vector<double>{0.5, 0.5}, 1);
  CHECK(ArgMax(a.probs) == 1);
  CHECK(Sum(a.probs) == doctest::Approx(1.0));
  a = AugmentProbabilities(std::vector<double>{0.334, 0.333, 0.333}, 2);
  CHECK(ArgMax(a.probs) == 2);
  a = AugmentProbabilities(std::vector<double>{0.25, 0.25, 0.25, 0.25}, 3);
  CHECK(ArgMax(a.probs) == 3);
  CHECK(Sum(a.probs) == doctest::Approx(1.0));
}

TEST_CASE("exhaustive simplex grid against the swap oracle") {
  const int steps = 20;
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; i + j <= steps; ++j) {
      const std::vector<double> p = {i / 20.0, j / 20.0, (steps - i - j) / 20.0};
      for (int t = 0; t < 3; ++t) {
        const auto a = AugmentProbabilities(p, t);
        CHECK(ArgMax(a.probs) == t);
        CHECK(std::abs(Sum(a.probs) - 1.0) < 1e-6);
        std::vector<double> swapped = p;
        std::swap(swapped[static_cast<std::size_t>(ArgMax(p))], swapped[static_cast<std::size_t>(t)]);
        if (std::count(swapped.begin(), swapped.end(), swapped[static_cast<std::size_t>(t)]) == 1) {
          for (std::size_t k = 0; k < 3; ++k) CHECK(a.probs[k] == doctest::Approx(swapped[k]).epsilon(1e-9));
        }
        for (double v : a.probs) CHECK((v >= 0.0 && v <= 1.0));
      }
    }
  }
}

TEST_CASE("target serialization") {
  CHECK(SerializeProbabilities(std::vector<double>{0.32, 0.39, 0.29}) == "class 0: 0.32; class 1: 0.39; class 2: 0.29.");
  CHECK(SerializeProbabilities(std::vector<double>{0.09, 0.0, 0.05, 0.86}) ==
        "class 0: 0.09; class 1: 0.0; class 2: 0.05; class 3: 0.86.");
  CHECK(SerializeTarget(OneHotTarget(2, 1)) == "class 0: 0.0; class 1: 1.0.");
  CHECK(SerializeProbabilities(std::vector<double>{0.3, 0.7}) == "class 0: 0.3; class 1: 0.7.");
}

TEST_CASE("serialize then parse is the identity at two decimals") {
  SeededRng rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 2 + rng.Below(6);
    std::vector<double> p(k);
    for (auto& v : p) v = rng.Uniform();
    const double s = Sum(p);
    for (auto& v : p) v /= s;
    const int t = static_cast<int>(rng.Below(k));
    const auto a = AugmentProbabilities(p, t);
    const auto parsed = ParseGeneration(SerializeTarget(a), static_cast<int>(k));
    CHECK(parsed.status == ParseStatus::kOk);
    CHECK(parsed.predicted_class == t);
    for (std::size_t i = 0; i < k; ++i) CHECK(parsed.probs[i] == doctest::Approx(a.probs[i]).epsilon(1e-12));
  }
}

TEST_CASE("external predictor") {
  SUBCASE("constant label") {
    Matrix x;
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) {
      x.push_back({static_cast<double>(i), static_cast<double>(i % 3)});
      y.push_back(0);
    }
    const auto model = FitExternalPredictor(x, y, 2);
    for (const auto& row : x) CHECK(model.PredictProba(row)[0] >= 0.99);
  }
  SUBCASE("separable blobs") {
    SeededRng rng(4);
    Matrix x;
    std::vector<int> y;
    for (int i = 0; i < 500; ++i) {
      const int c = static_cast<int>(rng.Below(2));
      const double offset = c ? 0.5 + std::abs(rng.Normal()) : -0.5 - std::abs(rng.Normal());
      x.push_back({offset, rng.Normal()});
      y.push_back(c);
    }
    const auto model = FitExternalPredictor(x, y, 2);
    int ok = 0;
    for (std::size_t i = 0; i < x.size(); ++i) ok += model.PredictClass(x[i]) == y[i];
    CHECK(ok >= 495);
  }
  SUBCASE("errors") {
    Matrix x(5, std::vector<double>{1.0});
    std::vector<int> y(5, 0);
    CHECK(KindOf([&] { FitExternalPredictor(x, y, 2); }) == ErrorKind::kInvalidArgument);
    CHECK(KindOf([&] { FitExternalPredictor(Matrix(20, {1.0}), std::vector<int>(20, 0), 1); }) ==
          ErrorKind::kDegenerate);
    CHECK(KindOf([&] { FitExternalPredictor(Matrix{}, std::vector<int>{}, 2); }) == ErrorKind::kInvalidArgument);
  }
}

TEST_CASE("calibrated probabilities are a distribution and augmentation matches labels") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto prepared = testing::SyntheticPrepared({.rows = 120, .classes = 3, .seed = seed});
    const Dataset& d = prepared->data;
    const auto enc = OrdinalEncoder::Fit(d);
    std::vector<int> y;
    for (const Row& r : d.rows) y.push_back(*prepared->space.ClassOf(r.cells[d.TargetIndex()], d.columns[d.TargetIndex()]));
    const Matrix x = enc.Transform(d.rows);
    const auto model = FitExternalPredictor(x, y, static_cast<int>(prepared->space.size()), {}, {3, seed});
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto p = model.PredictProba(x[i]);
      CHECK(std::abs(Sum(p) - 1.0) < 1e-6);
      for (double v : p) CHECK((v >= 0.0 && v <= 1.0));
      const auto a = Augment(model, x[i], y[i]);
      CHECK(ArgMax(a.probs) == y[i]);
      CHECK(std::abs(Sum(a.probs) - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("dataset target spaces") {
  const auto discrete = testing::SyntheticPrepared({.rows = 50, .classes = 2});
  CHECK_FALSE(discrete->space.binned());
  std::string csv = "x,charges\n";
  for (int i = 0; i < 60; ++i) csv += std::to_string(i) + "," + std::to_string(1000 + i * 37.5) + "\n";
  const Dataset d = LoadDatasetFromText(csv, ManifestEntry{"c", "", "charges", {}});
  const TargetSpace s = BuildTargetSpace(d);
  CHECK(s.binned());
  CHECK(s.size() == 4);
}
