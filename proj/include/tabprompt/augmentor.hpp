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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tabprompt/boosting.hpp"
#include "tabprompt/encoding.hpp"
#include "tabprompt/ingest.hpp"
#include "tabprompt/isotonic.hpp"

namespace tabprompt {

struct TargetClass {
  std::string label;
  std::string explanation;

  bool operator==(const TargetClass&) const = default;
};

struct DiscreteOrigin {
  bool operator==(const DiscreteOrigin&) const = default;
};

struct BinnedOrigin {
  std::array<double, 3> edges{};  // q1 <= q2 <= q3

  bool operator==(const BinnedOrigin&) const = default;
};

struct TargetSpace {
  std::vector<TargetClass> classes;
  std::variant<DiscreteOrigin, BinnedOrigin> origin;

  std::size_t size() const { return classes.size(); }
  bool binned() const { return std::holds_alternative<BinnedOrigin>(origin); }

  // Class index of a raw target cell; nullopt when it has no class.
  std::optional<int> ClassOf(const Cell& cell, const ColumnSchema& schema) const;

  bool operator==(const TargetSpace&) const = default;
};

struct AugmentedTarget {
  std::vector<double> probs;
  int true_class = 0;
};

// Quartile bins at the 25/50/75 linear-interpolation percentiles.
TargetSpace BinContinuous(std::span<const double> values);

// Classes in order of first appearance of `labels`; explanations default to
// the label text.
TargetSpace OneHotSpace(std::span<const std::string> labels,
                        std::span<const std::string> explanations = {});

// Builds the target space for a dataset whose target column is set.
TargetSpace BuildTargetSpace(const Dataset& d);

// Linear-interpolation percentile, q in [0, 1].
double Percentile(std::vector<double> values, double q);

struct CalibrationParams {
  int folds = 3;
  std::uint64_t seed = 0;
};

// Boosted trees plus per-class isotonic calibrators fit on out-of-fold
// scores, renormalized to sum to one.
class TreeEnsembleModel {
 public:
  std::vector<double> PredictProba(std::span<const double> x) const;
  std::vector<double> RawProba(std::span<const double> x) const;
  int PredictClass(std::span<const double> x) const;

  int num_classes() const { return booster_.num_classes(); }
  const Booster& booster() const { return booster_; }
  const std::vector<IsotonicFit>& calibrators() const { return calibrators_; }

  TreeEnsembleModel() = default;
  TreeEnsembleModel(Booster booster, std::vector<IsotonicFit> calibrators)
      : booster_(std::move(booster)), calibrators_(std::move(calibrators)) {}

 private:
  Booster booster_;
  std::vector<IsotonicFit> calibrators_;
};

// Requires num_classes >= 2 and at least 10 rows. Labels need not cover all
// classes; an absent class simply receives low probability.
TreeEnsembleModel FitExternalPredictor(const Matrix& x, std::span<const int> y,
                                       int num_classes,
                                       const BoostingParams& params = {},
                                       const CalibrationParams& calibration = {});

inline constexpr int kMinTrainingRows = 10;

// First index attaining the maximum.
int ArgMax(std::span<const double> values);

// Swap so the true class is the argmax, round to hundredths and repair the
// sum to exactly 1.00 without changing the argmax.
AugmentedTarget AugmentProbabilities(std::span<const double> probs, int true_class);

AugmentedTarget Augment(const TreeEnsembleModel& model, std::span<const double> x,
                        int true_class);

AugmentedTarget OneHotTarget(int num_classes, int true_class);

// "class 0: 0.32; class 1: 0.39; class 2: 0.29."
std::string SerializeTarget(const AugmentedTarget& target);
std::string SerializeProbabilities(std::span<const double> probs);

// 'class 0 stands for "Standard"; class 1 stands for "Premium"'
std::string SerializeClass(const TargetSpace& space);

}  // namespace tabprompt
