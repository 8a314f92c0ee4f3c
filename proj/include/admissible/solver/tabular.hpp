#pragma once

#include <vector>

#include "admissible/core/features.hpp"
#include "admissible/core/policy.hpp"
#include "admissible/env/environment.hpp"
#include "admissible/env/map2d.hpp"

namespace admissible::solver {

/// Finite MDP with state features. transitions[a](s, s') = P(s' | s, a).
struct TabularMDP {
  std::vector<Mat> transitions;
  Vec initial;
  double gamma = 0.9;
  Mat features;

  int n_states() const { return static_cast<int>(initial.size()); }
  int n_actions() const { return static_cast<int>(transitions.size()); }
  Eigen::Index feature_dim() const { return features.cols(); }
  /// Throws ConfigError unless every row and P0 are distributions (1e-9).
  void validate() const;
};

struct TabularSolution {
  std::vector<int> policy;  // greedy action per state
  Mat q;                    // S x A
  Vec v;
  Vec occupancy;            // discounted state occupancy d
  Vec mu;                   // features' d
};

/// Value iteration until sweeps change V by < 1e-12 (relative), greedy policy (lowest-index ties, with a
/// relative tolerance so that positive rescaling of w cannot flip ties), and
/// exact feature expectations of that policy.
TabularSolution tabular_solve(const TabularMDP& mdp, const RewardWeights& w);

/// d solving d = P0 + gamma P_pi' d; `policy` is S x A action probabilities.
Vec discounted_occupancy(const TabularMDP& mdp, const Mat& policy);
Vec policy_feature_expectations(const TabularMDP& mdp, const Mat& policy);

/// S x A table of a Policy defined over states encoded as [index].
Mat policy_table(const Policy& policy, int n_states);
Mat deterministic_table(const std::vector<int>& actions, int n_actions);

/// Tabular action values over states encoded as [index].
class TabularQ final : public ActionValueFunction {
 public:
  explicit TabularQ(Mat q) : q_(std::move(q)) {}
  int n_actions() const override { return static_cast<int>(q_.cols()); }
  Vec values(const Vec& state) const override;

 private:
  Mat q_;
};

/// Simulator for a TabularMDP; states are one-element vectors [index].
class TabularEnvironment final : public env::Environment {
 public:
  explicit TabularEnvironment(TabularMDP mdp);
  std::string name() const override { return "tabular"; }
  int n_actions() const override { return mdp_.n_actions(); }
  Eigen::Index state_dim() const override { return 1; }
  Vec initial_state(Rng& rng) const override;
  env::EnvStep step(const Vec& state, int action, Rng& rng) const override;
  const TabularMDP& mdp() const { return mdp_; }

 private:
  TabularMDP mdp_;
};

/// phi([index]) = row `index` of the feature matrix.
class TabularFeatures final : public FeatureMap {
 public:
  explicit TabularFeatures(Mat features) : features_(std::move(features)) {}
  std::string name() const override { return "tabular"; }
  Eigen::Index dim() const override { return features_.cols(); }
  Eigen::Index state_dim() const override { return 1; }
  Vec operator()(const Vec& state, int action) const override;

 private:
  Mat features_;
};

/// 2D map on a grid of square cells. Transition probabilities follow the
/// continuous step-size law (normal truncated at zero) applied to cell
/// centres; features are the cell centres. Start cells are those whose centre
/// lies in [start_low, start_high]^2, uniformly weighted.
TabularMDP discretized_map2d(const env::Map2DConfig& cfg, double cell, double gamma);

/// Centre [x, y] of a state of discretized_map2d.
Vec map2d_cell_center(const env::Map2DConfig& cfg, double cell, int state);

}  // namespace admissible::solver
