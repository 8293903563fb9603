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
#include <span>
#include <vector>

#include "tabprompt/encoding.hpp"

namespace tabprompt {

// Flat node arrays; node 0 is the root. Leaves have feature == -1.
// Rows go left when the feature is NaN or below the threshold.
struct RegressionTree {
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<double> value;

  double Predict(std::span<const double> x) const;
  std::size_t num_nodes() const { return feature.size(); }
  int depth() const;
};

struct BoostingParams {
  int rounds = 100;
  int max_depth = 6;
  double learning_rate = 0.3;
  double lambda = 1.0;
  double min_child_weight = 1.0;
};

// Multiclass softmax gradient boosting, one tree per class per round.
class Booster {
 public:
  // Trains on (x, y) with labels in [0, num_classes). When `loss_trace` is
  // non-null it receives the mean training log-loss before the first round
  // and after every round.
  static Booster Fit(const Matrix& x, std::span<const int> y, int num_classes,
                     const BoostingParams& params,
                     std::vector<double>* loss_trace = nullptr);

  std::vector<double> Margins(std::span<const double> x) const;
  std::vector<double> PredictProba(std::span<const double> x) const;

  int num_classes() const { return num_classes_; }
  int rounds() const { return rounds_; }
  double learning_rate() const { return learning_rate_; }
  // Tree for (round, class) lives at round * num_classes + class.
  const std::vector<RegressionTree>& trees() const { return trees_; }

  static Booster FromParts(int num_classes, int rounds, double learning_rate,
                           std::vector<RegressionTree> trees);

 private:
  int num_classes_ = 0;
  int rounds_ = 0;
  double learning_rate_ = 0.0;
  std::vector<RegressionTree> trees_;
};

std::vector<double> Softmax(std::span<const double> margins);

// Mean negative log-likelihood of `y` under the booster.
double MeanLogLoss(const Booster& booster, const Matrix& x, std::span<const int> y);

}  // namespace tabprompt
