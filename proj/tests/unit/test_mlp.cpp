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

#include "tabprompt/error.hpp"
#include "tabprompt/ingest.hpp"
#include "tabprompt/mlp.hpp"

using namespace tabprompt;

namespace {

// Largest relative deviation between the analytic gradient and central
// differences.
double GradientError(MlpModel model, const Matrix& xs, const std::vector<int>& y) {
  std::vector<double> grad;
  MlpLossAndGradient(model, xs, y, &grad);
  auto theta = MlpParameters(model);
  double worst = 0.0;
  const double h = 1e-6;
  for (std::size_t p = 0; p < theta.size(); ++p) {
    const double keep = theta[p];
    theta[p] = keep + h;
    SetMlpParameters(model, theta);
    const double up = MlpLossAndGradient(model, xs, y, nullptr);
    theta[p] = keep - h;
    SetMlpParameters(model, theta);
    const double down = MlpLossAndGradient(model, xs, y, nullptr);
    theta[p] = keep;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max(1e-7, std::abs(numeric) + std::abs(grad[p]));
    worst = std::max(worst, std::abs(numeric - grad[p]) / denom);
  }
  SetMlpParameters(model, theta);
  return worst;
}

}  // namespace

TEST_CASE("analytic gradient matches finite differences") {
  const Matrix x = {{0.5, -1.2, 2.0}, {1.5, 0.3, -0.7}, {-0.4, 0.9, 0.1}, {2.2, -0.5, 1.1}, {-1.0, -1.9, 0.6}};
  const std::vector<int> y = {0, 1, 1, 0, 1};
  MlpParams params;
  params.hidden = 4;
  params.epochs = 0;
  params.seed = 11;
  MlpModel model = FitMlp(x, y, 2, params);
  CHECK(model.num_parameters() == 3 * 4 + 4 + 4 * 2 + 2);
  const Matrix xs = Standardize(model, x);
  CHECK(GradientError(model, xs, y) < 1e-6);
  // And again after some training, away from the initialization. Gradients
  // are smaller here, so difference round-off weighs more.
  params.epochs = 25;
  params.learning_rate = 0.05;
  model = FitMlp(x, y, 2, params);
  CHECK(GradientError(model, Standardize(model, x), y) < 1e-4);
}

TEST_CASE("training fits separable data and lowers the loss") {
  SeededRng rng(5);
  Matrix x;
  std::vector<int> y;
  for (int i = 0; i < 200; ++i) {
    const int c = static_cast<int>(rng.Below(3));
    x.push_back({c * 3.0 + rng.Normal() * 0.3, rng.Normal()});
    y.push_back(c);
  }
  MlpParams params;
  params.epochs = 300;
  params.learning_rate = 0.01;
  std::vector<double> trace;
  const MlpModel model = FitMlp(x, y, 3, params, &trace);
  REQUIRE(trace.size() == 301);
  CHECK(trace.back() < 0.5 * trace.front());
  const auto pred = PredictMlp(model, x);
  int ok = 0;
  for (std::size_t i = 0; i < y.size(); ++i) ok += pred[i] == y[i];
  CHECK(ok >= 195);
  for (const auto& row : x) {
    const auto p = MlpProba(model, row);
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0));
  }
}

TEST_CASE("training is seeded") {
  const Matrix x = {{0}, {1}, {2}, {3}};
  const std::vector<int> y = {0, 0, 1, 1};
  MlpParams a;
  a.seed = 3;
  CHECK(FitMlp(x, y, 2, a).w1 == FitMlp(x, y, 2, a).w1);
  MlpParams b = a;
  b.seed = 4;
  CHECK(FitMlp(x, y, 2, a).w1 != FitMlp(x, y, 2, b).w1);
}

TEST_CASE("constant columns are left unscaled") {
  const Matrix x = {{1, 7}, {2, 7}, {3, 7}};
  const MlpModel m = FitMlp(x, std::vector<int>{0, 1, 0}, 2, MlpParams{.epochs = 1});
  CHECK(m.scale[1] == 1.0);
  CHECK(m.mean[1] == 7.0);
}

TEST_CASE("folding standardization preserves predictions") {
  const Matrix x = {{10, -3}, {12, 4}, {9, 0}, {15, 2}};
  const MlpModel m = FitMlp(x, std::vector<int>{0, 1, 0, 1}, 2, MlpParams{.epochs = 10});
  const MlpModel folded = FoldStandardization(m);
  for (const auto& row : x) {
    const auto p = MlpProba(m, row);
    const auto q = MlpProba(folded, row);
    for (std::size_t k = 0; k < p.size(); ++k) CHECK(p[k] == doctest::Approx(q[k]).epsilon(1e-9));
  }
  CHECK(folded.mean == std::vector<double>{0, 0});
  CHECK(folded.scale == std::vector<double>{1, 1});
}

TEST_CASE("imputation uses training means") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const Matrix x = {{1, nan}, {3, 4}, {nan, nan}};
  const auto means = ColumnMeans(x);
  CHECK(means[0] == 2.0);
  CHECK(means[1] == 4.0);
  const auto filled = ImputeMissing(x, means);
  CHECK(filled[2] == std::vector<double>{2.0, 4.0});
  CHECK(ColumnMeans(Matrix{{nan}})[0] == 0.0);
}

TEST_CASE("input validation") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto kind = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kIo;
  };
  const Matrix x = {{1}, {2}};
  CHECK(kind([&] { FitMlp(x, std::vector<int>{0, 0}, 1); }) == ErrorKind::kDegenerate);
  CHECK(kind([&] { FitMlp(Matrix{{1}}, std::vector<int>{0}, 2); }) == ErrorKind::kInvalidArgument);
  CHECK(kind([&] { FitMlp(Matrix{{1}, {nan}}, std::vector<int>{0, 1}, 2); }) == ErrorKind::kInvalidArgument);
  CHECK(kind([&] { FitMlp(Matrix{{1}, {2, 3}}, std::vector<int>{0, 1}, 2); }) == ErrorKind::kInvalidArgument);
  CHECK(kind([&] { FitMlp(x, std::vector<int>{0, 2}, 2); }) == ErrorKind::kInvalidArgument);
}
