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
#include <vector>

namespace tabprompt {

// Monotone nondecreasing least-squares fit, evaluated as a step function.
struct IsotonicFit {
  std::vector<double> breakpoints;  // strictly ascending
  std::vector<double> fitted;       // nondecreasing, one per breakpoint

  // Value of the last breakpoint <= x; clamped at both ends.
  double Predict(double x) const;
};

// Pool-adjacent-violators. Equal scores are pooled before fitting. Weights
// default to 1. Throws kInvalidArgument on empty or mismatched input.
IsotonicFit FitIsotonic(std::span<const double> scores,
                        std::span<const double> targets,
                        std::span<const double> weights = {});

// PAVA on values already ordered by score; returns one fitted value per input.
std::vector<double> PoolAdjacentViolators(std::span<const double> values,
                                          std::span<const double> weights = {});

}  // namespace tabprompt
