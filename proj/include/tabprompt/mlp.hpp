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

struct MlpParams {
  double learning_rate = 1e-3;
  int hidden = 100;
  int epochs = 100;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;
};

// Input -> ReLU hidden layer -> softmax. Weight matrices are row-major
// with shape (inputs x hidden) and (hidden x classes).
struct MlpModel {
  int num_inputs = 0;
  int hidden = 0;
  int num_classes = 0;
  std::vector<double> w1, b1, w2, b2;
  // Standardization; scale is 1 for constant columns.
  std::vector<double> mean, scale;

  std::size_t num_parameters() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
};

MlpModel FitMlp(const Matrix& x, std::span<const int> y, int num_classes,
                const MlpParams& params = {},
                std::vector<double>* loss_trace = nullptr);

std::vector<int> PredictMlp(const MlpModel& model, const Matrix& x);
std::vector<double> MlpProba(const MlpModel& model, std::span<const double> x);

// Mean cross-entropy on already standardized inputs, and its gradient with
// respect to (w1, b1, w2, b2) concatenated in that order.
double MlpLossAndGradient(const MlpModel& model, const Matrix& standardized,
                          std::span<const int> y, std::vector<double>* gradient);

// Flattened parameter access in the same order as the gradient.
std::vector<double> MlpParameters(const MlpModel& model);
void SetMlpParameters(MlpModel& model, std::span<const double> params);

Matrix Standardize(const MlpModel& model, const Matrix& x);

// Returns an equivalent model whose standardization is the identity.
MlpModel FoldStandardization(const MlpModel& model);

// Replaces NaN cells by the column mean of the non-missing training values.
std::vector<double> ColumnMeans(const Matrix& x);
Matrix ImputeMissing(const Matrix& x, std::span<const double> means);

}  // namespace tabprompt
