/*
 * Copyright 2026 The atebench Authors.
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

#include "atebench/boosted_trees.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "atebench/errors.h"
#include "atebench/logistic.h"

namespace atebench {
namespace {

// Minimum loss reduction for a split to be kept.
constexpr double kMinSplitGain = 1e-6;

double LeafObjective(double g, double h, double lambda) {
  const double denom = h + lambda;
  return denom > 0.0 ? g * g / denom : 0.0;
}

double MeanLogLoss(const std::vector<double>& margin, const PatternTable& t) {
  double loss = 0.0, total = 0.0;
  for (std::size_t i = 0; i < margin.size(); ++i) {
    const double m = margin[i];
    const double l = t.labels[i] > 0.5
                         ? (m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m)))
                         : (m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m)));
    loss += t.counts[i] * l;
    total += t.counts[i];
  }
  return loss / total;
}

class TreeBuilder {
 public:
  TreeBuilder(const PatternTable& t, const std::vector<double>& grad,
              const std::vector<double>& hess, const BoostedTreesConfig& cfg)
      : t_(t), grad_(grad), hess_(hess), cfg_(cfg) {}

  // Grows one tree over `rows`; writes each pattern's leaf score to `delta`.
  std::vector<TreeNode> Build(std::vector<std::size_t> rows,
                              std::vector<double>* delta) {
    nodes_.clear();
    delta_ = delta;
    Grow(std::move(rows), 0);
    return std::move(nodes_);
  }

 private:
  struct Split {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
  };

  Split FindSplit(std::vector<std::size_t>& rows, double g_total,
                  double h_total) const {
    Split best;
    const double lambda = cfg_.l2_penalty;
    const double parent = LeafObjective(g_total, h_total, lambda);
    const std::size_t cols = t_.features.cols;
    for (std::size_t f = 0; f < cols; ++f) {
      std::stable_sort(rows.begin(), rows.end(),
                       [&](std::size_t a, std::size_t b) {
                         return t_.features(a, f) < t_.features(b, f);
                       });
      double g_left = 0.0, h_left = 0.0;
      for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
        g_left += grad_[rows[k]];
        h_left += hess_[rows[k]];
        const double here = t_.features(rows[k], f);
        const double next = t_.features(rows[k + 1], f);
        if (here == next) continue;
        const double h_right = h_total - h_left;
        if (h_left < cfg_.min_child_weight || h_right < cfg_.min_child_weight) {
          continue;
        }
        const double gain = LeafObjective(g_left, h_left, lambda) +
                            LeafObjective(g_total - g_left, h_right, lambda) -
                            parent;
        if (gain > best.gain) {
          best = {gain, static_cast<int>(f), 0.5 * (here + next)};
        }
      }
    }
    return best;
  }

  int Grow(std::vector<std::size_t> rows, int depth) {
    double g = 0.0, h = 0.0;
    for (const std::size_t r : rows) {
      g += grad_[r];
      h += hess_[r];
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    if (depth < cfg_.max_depth && rows.size() > 1) {
      const Split split = FindSplit(rows, g, h);
      if (split.feature >= 0 && split.gain > kMinSplitGain) {
        std::vector<std::size_t> left, right;
        for (const std::size_t r : rows) {
          (t_.features(r, static_cast<std::size_t>(split.feature)) < split.threshold
               ? left
               : right)
              .push_back(r);
        }
        nodes_[id].feature = split.feature;
        nodes_[id].threshold = split.threshold;
        const int l = Grow(std::move(left), depth + 1);
        const int r = Grow(std::move(right), depth + 1);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
      }
    }
    const double denom = h + cfg_.l2_penalty;
    const double value = denom > 0.0 ? -g / denom * cfg_.learning_rate : 0.0;
    nodes_[id].value = value;
    for (const std::size_t r : rows) (*delta_)[r] = value;
    return id;
  }

  const PatternTable& t_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  const BoostedTreesConfig& cfg_;
  std::vector<TreeNode> nodes_;
  std::vector<double>* delta_ = nullptr;
};

double TreeScore(const std::vector<TreeNode>& tree, std::span<const double> row) {
  int id = 0;
  while (tree[static_cast<std::size_t>(id)].feature >= 0) {
    const TreeNode& node = tree[static_cast<std::size_t>(id)];
    id = row[static_cast<std::size_t>(node.feature)] < node.threshold ? node.left
                                                                      : node.right;
  }
  return tree[static_cast<std::size_t>(id)].value;
}

}  // namespace

void BoostedTreesConfig::Validate() const {
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) {
    throw ModelError(fmt::format("learning_rate {} not in (0,1]", learning_rate));
  }
  if (rounds < 1) throw ModelError("boosted trees need rounds >= 1");
  if (max_depth < 1) throw ModelError("boosted trees need max_depth >= 1");
  if (min_child_weight < 0.0) throw ModelError("min_child_weight must be >= 0");
  if (l2_penalty < 0.0) throw ModelError("l2_penalty must be >= 0");
}

BoostedTreesModel::BoostedTreesModel(std::size_t num_features, double base_margin,
                                     std::vector<std::vector<TreeNode>> trees,
                                     std::vector<double> training_loss)
    : num_features_(num_features),
      base_margin_(base_margin),
      trees_(std::move(trees)),
      training_loss_(std::move(training_loss)) {
  diagnostics_.iterations = static_cast<int>(trees_.size());
}

std::vector<double> BoostedTreesModel::PredictMargin(const FeatureMatrix& X) const {
  std::vector<double> margin(X.rows, base_margin_);
  for (std::size_t i = 0; i < X.rows; ++i) {
    const auto row = X.row(i);
    for (const auto& tree : trees_) margin[i] += TreeScore(tree, row);
  }
  return margin;
}

std::vector<double> BoostedTreesModel::PredictImpl(const FeatureMatrix& X) const {
  std::vector<double> p = PredictMargin(X);
  for (double& v : p) v = Sigmoid(v);
  return p;
}

std::unique_ptr<BoostedTreesModel> FitBoostedTrees(const FeatureMatrix& X,
                                                   Labels y,
                                                   const BoostedTreesConfig& cfg) {
  cfg.Validate();
  X.Validate();
  if (X.rows == 0) throw ModelError("cannot fit boosted trees on 0 rows");
  for (const auto label : y) {
    if (label > 1) throw ModelError("labels must be 0/1");
  }
  const PatternTable t = CompressPatterns(X, y);
  const std::size_t m = t.features.rows;
  constexpr double kBaseMargin = 0.0;  // base score 0.5

  std::vector<double> margin(m, kBaseMargin), grad(m), hess(m), delta(m);
  std::vector<std::size_t> all(m);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::vector<TreeNode>> trees;
  trees.reserve(static_cast<std::size_t>(cfg.rounds));
  std::vector<double> loss{MeanLogLoss(margin, t)};

  TreeBuilder builder(t, grad, hess, cfg);
  for (int round = 0; round < cfg.rounds; ++round) {
    for (std::size_t i = 0; i < m; ++i) {
      const double p = Sigmoid(margin[i]);
      grad[i] = t.counts[i] * (p - t.labels[i]);
      hess[i] = t.counts[i] * p * (1.0 - p);
    }
    trees.push_back(builder.Build(all, &delta));
    for (std::size_t i = 0; i < m; ++i) margin[i] += delta[i];
    loss.push_back(MeanLogLoss(margin, t));
  }
  return std::make_unique<BoostedTreesModel>(X.cols, kBaseMargin, std::move(trees),
                                             std::move(loss));
}

ModelFactory BoostedTreesFactory(BoostedTreesConfig cfg) {
  cfg.Validate();
  return [cfg](const FeatureMatrix& X, Labels y) -> std::unique_ptr<FittedModel> {
    return FitBoostedTrees(X, y, cfg);
  };
}

}  // namespace atebench
