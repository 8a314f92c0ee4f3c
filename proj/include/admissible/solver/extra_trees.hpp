#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <json.hpp>

#include "admissible/core/types.hpp"

namespace admissible::solver {

/// Samples in rows.
using SampleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ExtraTreesParams {
  int n_trees = 50;
  /// Minimum number of training samples in every leaf.
  int min_leaf = 5;
  /// Candidate splits scored per node. 1 gives totally randomized trees,
  /// whose structure does not depend on the targets.
  int k_splits = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One binary regression tree in flat arrays. feature < 0 marks a leaf.
struct Tree {
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<double> value;

  int leaf_of(const double* x) const {
    int node = 0;
    while (feature[node] >= 0) node = x[feature[node]] < threshold[node] ? left[node] : right[node];
    return node;
  }
  std::size_t n_nodes() const { return feature.size(); }
};

/// Ensemble of extremely randomized trees (Geurts et al.); prediction is
/// the mean of the tree outputs.
class ExtraTrees {
 public:
  ExtraTrees() = default;

  static ExtraTrees fit(const SampleMatrix& X, const Vec& y, const ExtraTreesParams& params, int jobs = 1);

  double predict(const double* x) const;
  double predict(const Vec& x) const { return predict(x.data()); }
  Vec predict(const SampleMatrix& X) const;

  /// Leaf node of every row of X in every tree: result[t][i].
  std::vector<std::vector<int>> leaf_indices(const SampleMatrix& X) const;
  /// Replaces leaf values by the mean target of the training rows in each leaf,
  /// keeping the split structure. `leaves` is leaf_indices() of the training rows.
  void refit_leaves(const std::vector<std::vector<int>>& leaves, const Vec& y);

  const std::vector<Tree>& trees() const { return trees_; }
  std::vector<Tree>& mutable_trees() { return trees_; }
  Eigen::Index input_dim() const { return input_dim_; }

  nlohmann::json to_json() const;
  static ExtraTrees from_json(const nlohmann::json& j);

 private:
  std::vector<Tree> trees_;
  Eigen::Index input_dim_ = 0;
};

}  // namespace admissible::solver
