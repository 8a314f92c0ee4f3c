#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "admissible/core/errors.hpp"

namespace admissible {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a stream index
/// (splitmix64 finalizer). Used wherever work is split per trajectory/tree.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// One logged episode. Rewards are never stored: they are recomputed as w'phi.
///
/// `states[t]` is the state in which `actions[t]` was taken, and
/// `behavior_probs[t]` the probability the logging policy gave that action.
/// `final_state` is the state reached after the last action; when `terminal`
/// is set it is a terminal state and carries no bootstrap value.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::vector<Vec> states, std::vector<int> actions, std::vector<double> behavior_probs,
             Vec final_state, bool terminal = false);

  std::size_t length() const { return actions_.size(); }
  const std::vector<Vec>& states() const { return states_; }
  const std::vector<int>& actions() const { return actions_; }
  const std::vector<double>& behavior_probs() const { return behavior_probs_; }
  const Vec& final_state() const { return final_state_; }
  bool terminal() const { return terminal_; }
  Eigen::Index state_dim() const { return states_.empty() ? final_state_.size() : states_.front().size(); }

  /// Successor of step t: states[t+1], or final_state for the last step.
  const Vec& next_state(std::size_t t) const {
    return t + 1 < states_.size() ? states_[t + 1] : final_state_;
  }

 private:
  std::vector<Vec> states_;
  std::vector<int> actions_;
  std::vector<double> behavior_probs_;
  Vec final_state_;
  bool terminal_ = false;
};

struct DatasetMetadata {
  std::string env;
  std::uint64_t seed = 0;
  std::string policy_desc;
};

/// Non-empty collection of trajectories sharing one state dimensionality.
class BatchDataset {
 public:
  BatchDataset(std::vector<Trajectory> trajectories, DatasetMetadata metadata);

  std::size_t size() const { return trajectories_.size(); }
  const Trajectory& operator[](std::size_t i) const { return trajectories_[i]; }
  const std::vector<Trajectory>& trajectories() const { return trajectories_; }
  const DatasetMetadata& metadata() const { return metadata_; }
  Eigen::Index state_dim() const { return trajectories_.front().state_dim(); }
  std::size_t total_steps() const;

  /// Stable 64-bit content hash (states, actions, probabilities) used as a cache key.
  std::uint64_t content_hash() const;

  auto begin() const { return trajectories_.begin(); }
  auto end() const { return trajectories_.end(); }

 private:
  std::vector<Trajectory> trajectories_;
  DatasetMetadata metadata_;
};

/// Reward weight vector w defining R = w'phi.
class RewardWeights {
 public:
  RewardWeights() = default;
  explicit RewardWeights(Vec w, bool normalized = false);

  /// Scales w to unit l1 norm. Throws ConfigError for the zero vector.
  static RewardWeights normalized(const Vec& w);

  const Vec& values() const { return w_; }
  Eigen::Index dim() const { return w_.size(); }
  double operator[](Eigen::Index i) const { return w_[i]; }
  bool is_normalized() const { return normalized_; }
  double l1_norm() const { return w_.lpNorm<1>(); }

 private:
  Vec w_;
  bool normalized_ = false;
};

}  // namespace admissible
