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

#include "tabprompt/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tabprompt/error.hpp"

namespace tabprompt {
namespace {

constexpr double kMinHessian = 1e-16;

bool GoesLeft(double x, double threshold) { return std::isnan(x) || x < threshold; }

// NaN sorts first so that a scan meets missing values before any number.
bool FeatureLess(double a, double b) {
  if (std::isnan(a)) return !std::isnan(b);
  if (std::isnan(b)) return false;
  return a < b;
}

bool SameValue(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

double SplitThreshold(double below, double above) {
  if (std::isnan(below)) return above;
  const double mid = below + (above - below) / 2.0;
  return mid > below ? mid : above;
}

struct NodeStats {
  double grad = 0.0;
  double hess = 0.0;
  double abs_grad = 0.0;
  double min_grad = std::numeric_limits<double>::infinity();
  double max_grad = -std::numeric_limits<double>::infinity();
};

struct Candidate {
  double gain = -std::numeric_limits<double>::infinity();
  int feature = -1;
  double threshold = 0.0;
  double left_grad = 0.0, left_hess = 0.0;
};

class TreeGrower {
 public:
  TreeGrower(const Matrix& x, const std::vector<std::vector<int>>& sorted, const BoostingParams& params)
      : x_(x), sorted_(sorted), params_(params) {}

  RegressionTree Grow(const std::vector<double>& grad, const std::vector<double>& hess) {
    const std::size_t n = x_.size();
    RegressionTree tree;
    std::vector<NodeStats> stats(1);
    AddNode(tree);
    std::vector<int> node_of(n, 0);
    for (std::size_t i = 0; i < n; ++i) Accumulate(stats[0], grad[i], hess[i]);

    std::vector<int> frontier{0};
    for (int depth = 0; depth < params_.max_depth && !frontier.empty(); ++depth) {
      std::vector<int> active;
      for (int node : frontier) {
        const NodeStats& s = stats[static_cast<std::size_t>(node)];
        // Constant-gradient nodes never gain from a split.
        if (s.max_grad > s.min_grad && s.hess >= 2.0 * params_.min_child_weight) active.push_back(node);
      }
      if (active.empty()) break;
      std::vector<int> slot(tree.num_nodes(), -1);
      for (std::size_t a = 0; a < active.size(); ++a) slot[static_cast<std::size_t>(active[a])] = static_cast<int>(a);

      std::vector<Candidate> best(active.size());
      FindSplits(grad, hess, node_of, stats, active, slot, best);

      std::vector<int> next;
      std::vector<int> left_of(tree.num_nodes(), -1);
      for (std::size_t a = 0; a < active.size(); ++a) {
        const Candidate& c = best[a];
        // Zero-gain splits are kept so that pure interactions (XOR) can be
        // resolved one level further down.
        if (c.feature < 0 || c.gain < 0.0) continue;
        const int node = active[a];
        const int l = AddNode(tree);
        const int r = AddNode(tree);
        stats.resize(tree.num_nodes());
        auto idx = static_cast<std::size_t>(node);
        tree.feature[idx] = c.feature;
        tree.threshold[idx] = c.threshold;
        tree.left[idx] = l;
        tree.right[idx] = r;
        left_of.resize(tree.num_nodes(), -1);
        left_of[idx] = l;
        next.push_back(l);
        next.push_back(r);
      }
      if (next.empty()) break;
      for (int node : next) stats[static_cast<std::size_t>(node)] = NodeStats{};
      for (std::size_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(node_of[i]);
        if (idx >= left_of.size() || left_of[idx] < 0) continue;
        const double v = x_[i][static_cast<std::size_t>(tree.feature[idx])];
        node_of[i] = GoesLeft(v, tree.threshold[idx]) ? tree.left[idx] : tree.right[idx];
        Accumulate(stats[static_cast<std::size_t>(node_of[i])], grad[i], hess[i]);
      }
      frontier = std::move(next);
    }

    for (std::size_t node = 0; node < tree.num_nodes(); ++node) {
      if (tree.feature[node] >= 0) continue;
      const NodeStats& s = stats[node];
      tree.value[node] = -params_.learning_rate * s.grad / (s.hess + params_.lambda);
    }
    return tree;
  }

 private:
  static int AddNode(RegressionTree& tree) {
    tree.feature.push_back(-1);
    tree.threshold.push_back(0.0);
    tree.left.push_back(-1);
    tree.right.push_back(-1);
    tree.value.push_back(0.0);
    return static_cast<int>(tree.feature.size() - 1);
  }

  static void Accumulate(NodeStats& s, double g, double h) {
    s.grad += g;
    s.hess += h;
    s.abs_grad += std::abs(g);
    s.min_grad = std::min(s.min_grad, g);
    s.max_grad = std::max(s.max_grad, g);
  }

  double Score(double g, double h) const { return g * g / (h + params_.lambda); }

  void FindSplits(const std::vector<double>& grad, const std::vector<double>& hess,
                  const std::vector<int>& node_of, const std::vector<NodeStats>& stats,
                  const std::vector<int>& active, const std::vector<int>& slot,
                  std::vector<Candidate>& best) const {
    struct Scan {
      double grad = 0.0, hess = 0.0, last = 0.0;
      bool started = false;
    };
    const double mcw = params_.min_child_weight;
    for (std::size_t f = 0; f < sorted_.size(); ++f) {
      std::vector<Scan> scan(active.size());
      for (int row : sorted_[f]) {
        const auto i = static_cast<std::size_t>(row);
        const auto node = static_cast<std::size_t>(node_of[i]);
        if (node >= slot.size() || slot[node] < 0) continue;
        const auto a = static_cast<std::size_t>(slot[node]);
        Scan& s = scan[a];
        const double v = x_[i][f];
        if (s.started && !SameValue(v, s.last)) {
          const NodeStats& total = stats[node];
          const double gr = total.grad - s.grad;
          const double hr = total.hess - s.hess;
          if (s.hess >= mcw && hr >= mcw) {
            double gain = Score(s.grad, s.hess) + Score(gr, hr) - Score(total.grad, total.hess);
            // Gradient sums that cancel leave round-off residues; treat them
            // as zero so balanced nodes still split.
            if (std::abs(gain) <= 1e-12 * Score(total.abs_grad, total.hess)) gain = 0.0;
            if (gain > best[a].gain) {
              best[a] = {gain, static_cast<int>(f), SplitThreshold(s.last, v), s.grad, s.hess};
            }
          }
        }
        s.grad += grad[i];
        s.hess += hess[i];
        s.last = v;
        s.started = true;
      }
    }
  }

  const Matrix& x_;
  const std::vector<std::vector<int>>& sorted_;
  const BoostingParams& params_;
};

}  // namespace

double RegressionTree::Predict(std::span<const double> x) const {
  std::size_t node = 0;
  while (feature[node] >= 0) {
    const double v = x[static_cast<std::size_t>(feature[node])];
    node = static_cast<std::size_t>(GoesLeft(v, threshold[node]) ? left[node] : right[node]);
  }
  return value[node];
}

int RegressionTree::depth() const {
  if (feature.empty()) return 0;
  std::vector<int> d(feature.size(), 0);
  int deepest = 0;
  for (std::size_t node = 0; node < feature.size(); ++node) {
    if (feature[node] < 0) continue;
    for (int child : {left[node], right[node]}) {
      d[static_cast<std::size_t>(child)] = d[node] + 1;
      deepest = std::max(deepest, d[static_cast<std::size_t>(child)]);
    }
  }
  return deepest;
}

std::vector<double> Softmax(std::span<const double> margins) {
  std::vector<double> p(margins.begin(), margins.end());
  if (p.empty()) return p;
  const double top = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

Booster Booster::FromParts(int num_classes, int rounds, double learning_rate,
                           std::vector<RegressionTree> trees) {
  if (trees.size() != static_cast<std::size_t>(num_classes) * static_cast<std::size_t>(rounds)) {
    throw Error(ErrorKind::kInvalidArgument, "tree count must equal rounds x classes");
  }
  Booster b;
  b.num_classes_ = num_classes;
  b.rounds_ = rounds;
  b.learning_rate_ = learning_rate;
  b.trees_ = std::move(trees);
  return b;
}

Booster Booster::Fit(const Matrix& x, std::span<const int> y, int num_classes,
                     const BoostingParams& params, std::vector<double>* loss_trace) {
  if (x.empty()) throw Error(ErrorKind::kInvalidArgument, "boosting needs a non-empty matrix");
  if (x.size() != y.size()) throw Error(ErrorKind::kInvalidArgument, "rows and labels differ in length");
  if (num_classes < 1) throw Error(ErrorKind::kInvalidArgument, "boosting needs at least one class");
  const std::size_t n = x.size();
  const std::size_t features = x.front().size();
  for (const auto& row : x) {
    if (row.size() != features) throw Error(ErrorKind::kInvalidArgument, "ragged feature matrix");
  }
  for (int label : y) {
    if (label < 0 || label >= num_classes) throw Error(ErrorKind::kInvalidArgument, "label out of range");
  }

  std::vector<std::vector<int>> sorted(features);
  for (std::size_t f = 0; f < features; ++f) {
    auto& order = sorted[f];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return FeatureLess(x[static_cast<std::size_t>(a)][f], x[static_cast<std::size_t>(b)][f]);
    });
  }

  const auto k_classes = static_cast<std::size_t>(num_classes);
  std::vector<std::vector<double>> margins(n, std::vector<double>(k_classes, 0.0));
  auto mean_loss = [&] {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = Softmax(margins[i]);
      total -= std::log(std::max(p[static_cast<std::size_t>(y[i])], 1e-300));
    }
    return total / static_cast<double>(n);
  };
  if (loss_trace) loss_trace->assign(1, mean_loss());

  Booster booster;
  booster.num_classes_ = num_classes;
  booster.rounds_ = params.rounds;
  booster.learning_rate_ = params.learning_rate;
  booster.trees_.reserve(static_cast<std::size_t>(params.rounds) * k_classes);

  TreeGrower grower(x, sorted, params);
  std::vector<std::vector<double>> probs(n);
  std::vector<double> grad(n), hess(n);
  for (int round = 0; round < params.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) probs[i] = Softmax(margins[i]);
    for (std::size_t k = 0; k < k_classes; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = probs[i][k];
        grad[i] = p - (static_cast<std::size_t>(y[i]) == k ? 1.0 : 0.0);
        hess[i] = std::max(2.0 * p * (1.0 - p), kMinHessian);
      }
      booster.trees_.push_back(grower.Grow(grad, hess));
    }
    const auto* round_trees = &booster.trees_[booster.trees_.size() - k_classes];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < k_classes; ++k) margins[i][k] += round_trees[k].Predict(x[i]);
    }
    if (loss_trace) loss_trace->push_back(mean_loss());
  }
  return booster;
}

std::vector<double> Booster::Margins(std::span<const double> x) const {
  const auto k_classes = static_cast<std::size_t>(num_classes_);
  std::vector<double> m(k_classes, 0.0);
  for (std::size_t t = 0; t < trees_.size(); ++t) m[t % k_classes] += trees_[t].Predict(x);
  return m;
}

std::vector<double> Booster::PredictProba(std::span<const double> x) const {
  return Softmax(Margins(x));
}

double MeanLogLoss(const Booster& booster, const Matrix& x, std::span<const int> y) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto p = booster.PredictProba(x[i]);
    total -= std::log(std::max(p[static_cast<std::size_t>(y[i])], 1e-300));
  }
  return x.empty() ? 0.0 : total / static_cast<double>(x.size());
}

}  // namespace tabprompt
