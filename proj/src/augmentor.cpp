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

#include "tabprompt/augmentor.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "tabprompt/error.hpp"
#include "tabprompt/serializer.hpp"
#include "tabprompt/text.hpp"

namespace tabprompt {
namespace {

std::string EdgeText(double v) {
  const SerializationConfig cfg;
  return FormatDecimal(v, cfg.float_precision, cfg.min_float_decimals);
}

}  // namespace

std::optional<int> TargetSpace::ClassOf(const Cell& cell, const ColumnSchema& schema) const {
  if (!cell) return std::nullopt;
  if (const auto* bins = std::get_if<BinnedOrigin>(&origin)) {
    const auto v = ParseDouble(*cell);
    if (!v || std::isnan(*v)) return std::nullopt;
    const auto& q = bins->edges;
    if (*v < q[0]) return 0;
    if (*v < q[1]) return 1;
    if (*v <= q[2]) return 2;
    return 3;
  }
  const std::string label = RenderValue(cell, schema);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].label == label) return static_cast<int>(i);
  }
  return std::nullopt;
}

double Percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorKind::kInvalidArgument, "percentile of an empty list");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + (values[hi] - values[lo]) * frac;
}

TargetSpace BinContinuous(std::span<const double> values) {
  const std::set<double> distinct(values.begin(), values.end());
  if (distinct.size() < 4) {
    throw Error(ErrorKind::kDegenerate, "quartile binning needs at least 4 distinct values");
  }
  const std::vector<double> v(values.begin(), values.end());
  BinnedOrigin bins{{Percentile(v, 0.25), Percentile(v, 0.5), Percentile(v, 0.75)}};
  const auto& q = bins.edges;
  std::vector<std::string> labels = {
      "<" + EdgeText(q[0]),
      EdgeText(q[0]) + " - " + EdgeText(q[1]),
      EdgeText(q[1]) + " - " + EdgeText(q[2]),
      ">" + EdgeText(q[2]),
  };
  if (std::set<std::string>(labels.begin(), labels.end()).size() != labels.size()) {
    throw Error(ErrorKind::kDegenerate, "quartile edges collapse into duplicate bins");
  }
  TargetSpace space;
  for (auto& label : labels) space.classes.push_back({label, label});
  space.origin = bins;
  return space;
}

TargetSpace OneHotSpace(std::span<const std::string> labels, std::span<const std::string> explanations) {
  std::unordered_map<std::string, std::string> explain;
  if (!explanations.empty()) {
    if (explanations.size() != labels.size()) {
      throw Error(ErrorKind::kInvalidArgument, "explanations must align with labels");
    }
    for (std::size_t i = 0; i < labels.size(); ++i) explain.emplace(labels[i], explanations[i]);
  }
  TargetSpace space;
  std::set<std::string> seen;
  for (const auto& label : labels) {
    if (!seen.insert(label).second) continue;
    auto it = explain.find(label);
    space.classes.push_back({label, it != explain.end() ? it->second : label});
  }
  if (space.classes.size() < 2) throw Error(ErrorKind::kDegenerate, "target needs at least two classes");
  space.origin = DiscreteOrigin{};
  return space;
}

TargetSpace BuildTargetSpace(const Dataset& d) {
  const TargetKind kind = DetectTargetKind(d);
  if (const auto* discrete = std::get_if<DiscreteTarget>(&kind)) return OneHotSpace(discrete->labels);
  const std::size_t t = d.TargetIndex();
  std::vector<double> values;
  for (const Row& row : d.rows) {
    if (!row.cells[t]) continue;
    if (auto v = ParseDouble(*row.cells[t])) values.push_back(*v);
  }
  return BinContinuous(values);
}

int ArgMax(std::span<const double> values) {
  if (values.empty()) return -1;
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

std::vector<double> TreeEnsembleModel::RawProba(std::span<const double> x) const {
  return booster_.PredictProba(x);
}

std::vector<double> TreeEnsembleModel::PredictProba(std::span<const double> x) const {
  auto p = booster_.PredictProba(x);
  if (calibrators_.empty()) return p;
  double sum = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = std::clamp(calibrators_[k].Predict(p[k]), 0.0, 1.0);
    sum += p[k];
  }
  if (sum <= 0.0) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
  } else {
    for (double& v : p) v /= sum;
  }
  return p;
}

int TreeEnsembleModel::PredictClass(std::span<const double> x) const {
  return ArgMax(PredictProba(x));
}

TreeEnsembleModel FitExternalPredictor(const Matrix& x, std::span<const int> y, int num_classes,
                                       const BoostingParams& params,
                                       const CalibrationParams& calibration) {
  if (num_classes < 2) throw Error(ErrorKind::kDegenerate, "external predictor needs at least two classes");
  if (x.empty()) throw Error(ErrorKind::kInvalidArgument, "external predictor needs a non-empty matrix");
  if (x.size() < static_cast<std::size_t>(kMinTrainingRows)) {
    throw Error(ErrorKind::kInvalidArgument, "external predictor needs at least " +
                                                 std::to_string(kMinTrainingRows) + " rows, got " +
                                                 std::to_string(x.size()));
  }
  if (calibration.folds < 2) throw Error(ErrorKind::kInvalidArgument, "calibration needs at least 2 folds");
  const std::size_t n = x.size();
  const auto k_classes = static_cast<std::size_t>(num_classes);

  // Out-of-fold raw scores: fold of the j-th permuted row is j mod folds.
  const auto perm = Permutation(n, calibration.seed);
  std::vector<int> fold_of(n);
  for (std::size_t j = 0; j < n; ++j) fold_of[perm[j]] = static_cast<int>(j % static_cast<std::size_t>(calibration.folds));
  std::vector<std::vector<double>> oof(n);
  for (int fold = 0; fold < calibration.folds; ++fold) {
    Matrix fx;
    std::vector<int> fy;
    for (std::size_t i = 0; i < n; ++i) {
      if (fold_of[i] == fold) continue;
      fx.push_back(x[i]);
      fy.push_back(y[i]);
    }
    const Booster b = Booster::Fit(fx, fy, num_classes, params);
    for (std::size_t i = 0; i < n; ++i) {
      if (fold_of[i] == fold) oof[i] = b.PredictProba(x[i]);
    }
  }

  std::vector<IsotonicFit> calibrators;
  calibrators.reserve(k_classes);
  std::vector<double> scores(n), targets(n);
  for (std::size_t k = 0; k < k_classes; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = oof[i][k];
      targets[i] = static_cast<std::size_t>(y[i]) == k ? 1.0 : 0.0;
    }
    calibrators.push_back(FitIsotonic(scores, targets));
  }
  return TreeEnsembleModel(Booster::Fit(x, y, num_classes, params), std::move(calibrators));
}

AugmentedTarget AugmentProbabilities(std::span<const double> probs, int true_class) {
  if (true_class < 0 || static_cast<std::size_t>(true_class) >= probs.size()) {
    throw Error(ErrorKind::kInvalidArgument, "class index " + std::to_string(true_class) + " out of range");
  }
  std::vector<double> p(probs.begin(), probs.end());
  const int top = ArgMax(p);
  if (top != true_class) std::swap(p[static_cast<std::size_t>(top)], p[static_cast<std::size_t>(true_class)]);

  // Work in hundredths; the true class absorbs the rounding residue.
  const auto t = static_cast<std::size_t>(true_class);
  std::vector<long long> cents(p.size(), 0);
  long long others = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i == t) continue;
    cents[i] = std::clamp<long long>(std::llround(p[i] * 100.0), 0, 100);
    others += cents[i];
  }
  cents[t] = 100 - others;
  for (;;) {
    std::size_t rival = p.size();
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i != t && (rival == p.size() || cents[i] > cents[rival])) rival = i;
    }
    if (rival == p.size()) break;
    const bool loses = cents[t] < 0 || cents[t] < cents[rival] || (cents[t] == cents[rival] && rival < t);
    if (!loses) break;
    --cents[rival];
    ++cents[t];
  }
  AugmentedTarget out;
  out.true_class = true_class;
  out.probs.reserve(p.size());
  for (long long c : cents) out.probs.push_back(static_cast<double>(c) / 100.0);
  return out;
}

AugmentedTarget Augment(const TreeEnsembleModel& model, std::span<const double> x, int true_class) {
  if (true_class < 0 || true_class >= model.num_classes()) {
    throw Error(ErrorKind::kInvalidArgument, "class index " + std::to_string(true_class) + " out of range");
  }
  return AugmentProbabilities(model.PredictProba(x), true_class);
}

AugmentedTarget OneHotTarget(int num_classes, int true_class) {
  if (true_class < 0 || true_class >= num_classes) {
    throw Error(ErrorKind::kInvalidArgument, "class index " + std::to_string(true_class) + " out of range");
  }
  AugmentedTarget out;
  out.true_class = true_class;
  out.probs.assign(static_cast<std::size_t>(num_classes), 0.0);
  out.probs[static_cast<std::size_t>(true_class)] = 1.0;
  return out;
}

std::string SerializeProbabilities(std::span<const double> probs) {
  std::string out;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (i) out += "; ";
    out += "class " + std::to_string(i) + ": " + FormatDecimal(probs[i], 2, 1);
  }
  out += ".";
  return out;
}

std::string SerializeTarget(const AugmentedTarget& target) {
  return SerializeProbabilities(target.probs);
}

std::string SerializeClass(const TargetSpace& space) {
  if (space.classes.size() < 2) throw Error(ErrorKind::kInvalidArgument, "class details need at least two classes");
  std::string out;
  for (std::size_t i = 0; i < space.classes.size(); ++i) {
    if (i) out += "; ";
    out += "class " + std::to_string(i) + " stands for \"" + space.classes[i].explanation + "\"";
  }
  return out;
}

}  // namespace tabprompt
