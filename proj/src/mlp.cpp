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

#include "tabprompt/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tabprompt/augmentor.hpp"
#include "tabprompt/boosting.hpp"
#include "tabprompt/error.hpp"
#include "tabprompt/ingest.hpp"

namespace tabprompt {
namespace {

struct Forward {
  std::vector<double> pre;     // n x hidden
  std::vector<double> probs;   // n x classes
  double loss = 0.0;
};

Forward RunForward(const MlpModel& m, const Matrix& x, std::span<const int> y) {
  const auto n = x.size();
  const auto in = static_cast<std::size_t>(m.num_inputs);
  const auto h = static_cast<std::size_t>(m.hidden);
  const auto k = static_cast<std::size_t>(m.num_classes);
  Forward f;
  f.pre.assign(n * h, 0.0);
  f.probs.assign(n * k, 0.0);
  std::vector<double> z(k);
  for (std::size_t r = 0; r < n; ++r) {
    double* pre = &f.pre[r * h];
    for (std::size_t j = 0; j < h; ++j) pre[j] = m.b1[j];
    for (std::size_t i = 0; i < in; ++i) {
      const double xi = x[r][i];
      if (xi == 0.0) continue;
      const double* w = &m.w1[i * h];
      for (std::size_t j = 0; j < h; ++j) pre[j] += xi * w[j];
    }
    for (std::size_t c = 0; c < k; ++c) z[c] = m.b2[c];
    for (std::size_t j = 0; j < h; ++j) {
      const double a = std::max(0.0, pre[j]);
      if (a == 0.0) continue;
      const double* w = &m.w2[j * k];
      for (std::size_t c = 0; c < k; ++c) z[c] += a * w[c];
    }
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < k; ++c) sum += std::exp(z[c] - top);
    const double lse = top + std::log(sum);
    for (std::size_t c = 0; c < k; ++c) f.probs[r * k + c] = std::exp(z[c] - lse);
    if (!y.empty()) f.loss += lse - z[static_cast<std::size_t>(y[r])];
  }
  if (n > 0) f.loss /= static_cast<double>(n);
  return f;
}

void CheckArity(const MlpModel& m, std::size_t cols) {
  if (cols != static_cast<std::size_t>(m.num_inputs)) {
    throw Error(ErrorKind::kInvalidArgument, "expected " + std::to_string(m.num_inputs) +
                                                 " features, got " + std::to_string(cols));
  }
}

}  // namespace

std::vector<double> ColumnMeans(const Matrix& x) {
  if (x.empty()) return {};
  std::vector<double> sum(x[0].size(), 0.0);
  std::vector<std::size_t> count(x[0].size(), 0);
  for (const auto& row : x) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (std::isnan(row[i])) continue;
      sum[i] += row[i];
      ++count[i];
    }
  }
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = count[i] ? sum[i] / static_cast<double>(count[i]) : 0.0;
  return sum;
}

Matrix ImputeMissing(const Matrix& x, std::span<const double> means) {
  Matrix out = x;
  for (auto& row : out) {
    if (row.size() != means.size()) throw Error(ErrorKind::kInvalidArgument, "imputation arity mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (std::isnan(row[i])) row[i] = means[i];
    }
  }
  return out;
}

Matrix Standardize(const MlpModel& model, const Matrix& x) {
  Matrix out = x;
  for (auto& row : out) {
    CheckArity(model, row.size());
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = (row[i] - model.mean[i]) / model.scale[i];
  }
  return out;
}

std::vector<double> MlpParameters(const MlpModel& m) {
  std::vector<double> out;
  out.reserve(m.num_parameters());
  for (const auto* v : {&m.w1, &m.b1, &m.w2, &m.b2}) out.insert(out.end(), v->begin(), v->end());
  return out;
}

void SetMlpParameters(MlpModel& m, std::span<const double> params) {
  if (params.size() != m.num_parameters()) throw Error(ErrorKind::kInvalidArgument, "parameter count mismatch");
  auto it = params.begin();
  for (auto* v : {&m.w1, &m.b1, &m.w2, &m.b2}) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(v->size()), v->begin());
    it += static_cast<std::ptrdiff_t>(v->size());
  }
}

double MlpLossAndGradient(const MlpModel& m, const Matrix& x, std::span<const int> y,
                          std::vector<double>* gradient) {
  if (x.size() != y.size()) throw Error(ErrorKind::kInvalidArgument, "x and y differ in length");
  for (const auto& row : x) CheckArity(m, row.size());
  const Forward f = RunForward(m, x, y);
  if (gradient == nullptr) return f.loss;

  const auto n = x.size();
  const auto in = static_cast<std::size_t>(m.num_inputs);
  const auto h = static_cast<std::size_t>(m.hidden);
  const auto k = static_cast<std::size_t>(m.num_classes);
  gradient->assign(m.num_parameters(), 0.0);
  double* gw1 = gradient->data();
  double* gb1 = gw1 + m.w1.size();
  double* gw2 = gb1 + m.b1.size();
  double* gb2 = gw2 + m.w2.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> dz(k), dh(h);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      dz[c] = (f.probs[r * k + c] - (static_cast<std::size_t>(y[r]) == c ? 1.0 : 0.0)) * inv_n;
      gb2[c] += dz[c];
    }
    const double* pre = &f.pre[r * h];
    for (std::size_t j = 0; j < h; ++j) {
      const double a = std::max(0.0, pre[j]);
      double back = 0.0;
      for (std::size_t c = 0; c < k; ++c) {
        gw2[j * k + c] += a * dz[c];
        back += m.w2[j * k + c] * dz[c];
      }
      dh[j] = pre[j] > 0.0 ? back : 0.0;
      gb1[j] += dh[j];
    }
    for (std::size_t i = 0; i < in; ++i) {
      const double xi = x[r][i];
      if (xi == 0.0) continue;
      for (std::size_t j = 0; j < h; ++j) gw1[i * h + j] += xi * dh[j];
    }
  }
  return f.loss;
}

MlpModel FitMlp(const Matrix& x, std::span<const int> y, int num_classes, const MlpParams& params,
                std::vector<double>* loss_trace) {
  if (num_classes < 2) throw Error(ErrorKind::kDegenerate, "mlp needs at least two classes");
  if (x.size() < 2) throw Error(ErrorKind::kInvalidArgument, "mlp needs at least two samples");
  if (x.size() != y.size()) throw Error(ErrorKind::kInvalidArgument, "x and y differ in length");
  if (params.hidden < 1 || params.epochs < 0 || !(params.learning_rate > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "invalid mlp parameters");
  }
  const std::size_t in = x[0].size();
  for (const auto& row : x) {
    if (row.size() != in) throw Error(ErrorKind::kInvalidArgument, "ragged feature matrix");
    for (double v : row) {
      if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidArgument, "mlp inputs must be finite");
    }
  }
  for (int label : y) {
    if (label < 0 || label >= num_classes) throw Error(ErrorKind::kInvalidArgument, "label out of range");
  }

  MlpModel m;
  m.num_inputs = static_cast<int>(in);
  m.hidden = params.hidden;
  m.num_classes = num_classes;
  const auto h = static_cast<std::size_t>(params.hidden);
  const auto k = static_cast<std::size_t>(num_classes);
  const auto n = static_cast<double>(x.size());
  m.mean.assign(in, 0.0);
  m.scale.assign(in, 1.0);
  for (std::size_t i = 0; i < in; ++i) {
    double mu = 0.0;
    for (const auto& row : x) mu += row[i];
    mu /= n;
    double var = 0.0;
    for (const auto& row : x) var += (row[i] - mu) * (row[i] - mu);
    const double sd = std::sqrt(var / n);
    m.mean[i] = mu;
    m.scale[i] = sd > 0.0 ? sd : 1.0;
  }

  SeededRng rng(params.seed);
  auto glorot = [&rng](std::vector<double>& w, std::size_t fan_in, std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    w.resize(fan_in * fan_out);
    for (double& v : w) v = (2.0 * rng.Uniform() - 1.0) * limit;
  };
  glorot(m.w1, in, h);
  m.b1.assign(h, 0.0);
  glorot(m.w2, h, k);
  m.b2.assign(k, 0.0);

  const Matrix xs = Standardize(m, x);
  std::vector<double> theta = MlpParameters(m);
  std::vector<double> m1(theta.size(), 0.0), m2(theta.size(), 0.0), grad;
  double b1t = 1.0, b2t = 1.0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    const double loss = MlpLossAndGradient(m, xs, y, &grad);
    if (loss_trace) loss_trace->push_back(loss);
    b1t *= params.beta1;
    b2t *= params.beta2;
    for (std::size_t p = 0; p < theta.size(); ++p) {
      m1[p] = params.beta1 * m1[p] + (1.0 - params.beta1) * grad[p];
      m2[p] = params.beta2 * m2[p] + (1.0 - params.beta2) * grad[p] * grad[p];
      const double mhat = m1[p] / (1.0 - b1t);
      const double vhat = m2[p] / (1.0 - b2t);
      theta[p] -= params.learning_rate * mhat / (std::sqrt(vhat) + params.epsilon);
    }
    SetMlpParameters(m, theta);
  }
  if (loss_trace) loss_trace->push_back(MlpLossAndGradient(m, xs, y, nullptr));
  return m;
}

std::vector<double> MlpProba(const MlpModel& model, std::span<const double> x) {
  CheckArity(model, x.size());
  const Matrix one = Standardize(model, Matrix{std::vector<double>(x.begin(), x.end())});
  return RunForward(model, one, {}).probs;
}

std::vector<int> PredictMlp(const MlpModel& model, const Matrix& x) {
  const Matrix xs = Standardize(model, x);
  const Forward f = RunForward(model, xs, {});
  const auto k = static_cast<std::size_t>(model.num_classes);
  std::vector<int> out(x.size());
  for (std::size_t r = 0; r < x.size(); ++r) out[r] = ArgMax(std::span<const double>(&f.probs[r * k], k));
  return out;
}

MlpModel FoldStandardization(const MlpModel& model) {
  MlpModel out = model;
  const auto in = static_cast<std::size_t>(model.num_inputs);
  const auto h = static_cast<std::size_t>(model.hidden);
  for (std::size_t i = 0; i < in; ++i) {
    for (std::size_t j = 0; j < h; ++j) {
      const double w = model.w1[i * h + j] / model.scale[i];
      out.w1[i * h + j] = w;
      out.b1[j] -= model.mean[i] * w;
    }
  }
  out.mean.assign(in, 0.0);
  out.scale.assign(in, 1.0);
  return out;
}

}  // namespace tabprompt
