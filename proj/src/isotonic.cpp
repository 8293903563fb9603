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

#include "tabprompt/isotonic.hpp"

#include <algorithm>
#include <numeric>

#include "tabprompt/error.hpp"

namespace tabprompt {

std::vector<double> PoolAdjacentViolators(std::span<const double> values,
                                          std::span<const double> weights) {
  if (!weights.empty() && weights.size() != values.size()) {
    throw Error(ErrorKind::kInvalidArgument, "weights and values differ in length");
  }
  struct Block {
    double weighted_sum;
    double weight;
    std::size_t count;
    double mean() const { return weighted_sum / weight; }
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w > 0.0)) throw Error(ErrorKind::kInvalidArgument, "isotonic weights must be positive");
    blocks.push_back({values[i] * w, w, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      Block top = blocks.back();
      blocks.pop_back();
      blocks.back().weighted_sum += top.weighted_sum;
      blocks.back().weight += top.weight;
      blocks.back().count += top.count;
    }
  }
  std::vector<double> fitted;
  fitted.reserve(values.size());
  for (const Block& b : blocks) fitted.insert(fitted.end(), b.count, b.mean());
  return fitted;
}

IsotonicFit FitIsotonic(std::span<const double> scores, std::span<const double> targets,
                        std::span<const double> weights) {
  if (scores.empty()) throw Error(ErrorKind::kInvalidArgument, "isotonic fit needs at least one point");
  if (scores.size() != targets.size() || (!weights.empty() && weights.size() != scores.size())) {
    throw Error(ErrorKind::kInvalidArgument, "isotonic inputs differ in length");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Pool tied scores into one weighted point.
  IsotonicFit fit;
  std::vector<double> means, pooled_weights;
  for (std::size_t k = 0; k < order.size();) {
    const double x = scores[order[k]];
    double sum = 0.0, weight = 0.0;
    for (; k < order.size() && scores[order[k]] == x; ++k) {
      const double w = weights.empty() ? 1.0 : weights[order[k]];
      sum += targets[order[k]] * w;
      weight += w;
    }
    fit.breakpoints.push_back(x);
    means.push_back(sum / weight);
    pooled_weights.push_back(weight);
  }
  fit.fitted = PoolAdjacentViolators(means, pooled_weights);
  return fit;
}

double IsotonicFit::Predict(double x) const {
  if (fitted.empty()) return 0.0;
  if (!(x > breakpoints.front())) return fitted.front();
  if (x >= breakpoints.back()) return fitted.back();
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  return fitted[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

}  // namespace tabprompt
