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

// Gradient-boosted regression trees for binary log-loss, second-order
// (gradient + hessian) leaf values, exact greedy split search.

#ifndef ATEBENCH_BOOSTED_TREES_H_
#define ATEBENCH_BOOSTED_TREES_H_

#include <memory>
#include <vector>

#include "atebench/models.h"

namespace atebench {

// Defaults follow the usual gradient-boosting library defaults; `rounds` has
// no library default and is pinned here.
struct BoostedTreesConfig {
  double learning_rate = 0.3;
  int max_depth = 6;
  int rounds = 100;
  double min_child_weight = 1.0;
  double l2_penalty = 1.0;

  void Validate() const;
};

struct TreeNode {
  int feature = -1;  // -1 for a leaf
  double threshold = 0.0;  // go left iff value < threshold
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf score (already scaled by the learning rate)
};

class BoostedTreesModel final : public FittedModel {
 public:
  BoostedTreesModel(std::size_t num_features, double base_margin,
                    std::vector<std::vector<TreeNode>> trees,
                    std::vector<double> training_loss);

  ModelKind kind() const override { return ModelKind::kBoostedTrees; }
  std::size_t num_features() const override { return num_features_; }

  // Sum of the base margin and every tree's leaf score.
  std::vector<double> PredictMargin(const FeatureMatrix& X) const;

  const std::vector<std::vector<TreeNode>>& trees() const { return trees_; }

  // Mean training log-loss before any tree (index 0) and after each round.
  const std::vector<double>& training_loss() const { return training_loss_; }

 private:
  std::vector<double> PredictImpl(const FeatureMatrix& X) const override;

  std::size_t num_features_;
  double base_margin_;
  std::vector<std::vector<TreeNode>> trees_;
  std::vector<double> training_loss_;
};

std::unique_ptr<BoostedTreesModel> FitBoostedTrees(
    const FeatureMatrix& X, Labels y, const BoostedTreesConfig& cfg = {});

ModelFactory BoostedTreesFactory(BoostedTreesConfig cfg = {});

}  // namespace atebench

#endif  // ATEBENCH_BOOSTED_TREES_H_
