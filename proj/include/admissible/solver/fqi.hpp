#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <vector>

#include "admissible/core/features.hpp"
#include "admissible/core/policy.hpp"
#include "admissible/solver/regressor.hpp"

namespace admissible::solver {

/// Action values from one regressor per action, over regressor inputs.
class QFunction final : public ActionValueFunction {
 public:
  explicit QFunction(std::vector<RegressorPtr> per_action);

  int n_actions() const override { return static_cast<int>(regressors_.size()); }
  Vec values(const Vec& x) const override;
  const Regressor& regressor(int action) const { return *regressors_[static_cast<std::size_t>(action)]; }

  /// Versioned JSON; save -> load -> predict is bit-identical.
  nlohmann::json to_json() const;
  static QFunction from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static QFunction load(const std::filesystem::path& path);

 private:
  std::vector<RegressorPtr> regressors_;
};

using QFunctionPtr = std::shared_ptr<const QFunction>;

/// Deterministic argmax policy, ties to the lowest action index.
Policy greedy_policy(QFunctionPtr q);

using Encoder = std::function<Vec(const Vec&)>;

struct FqiParams {
  int iterations = 100;
  double gamma = 0.9;
  RegressorParams regressor;
  int jobs = 1;

  void validate() const;
};

/// Fitted Q-iteration over the transitions of a fixed batch. Everything that
/// does not depend on the reward (transition table, features, and for totally
/// randomized trees the split structure and leaf lookups) is built once, so
/// solving for many reward vectors only re-runs the Bellman iterations.
class FqiProblem {
 public:
  FqiProblem(const BatchDataset& data, FeatureMapPtr phi, int n_actions, FqiParams params,
             Encoder encode = nullptr);
  ~FqiProblem();
  FqiProblem(const FqiProblem&) = delete;
  FqiProblem& operator=(const FqiProblem&) = delete;

  /// Q for reward w'phi(s, a).
  QFunctionPtr solve(const RewardWeights& w) const;
  /// Q for an explicit reward per transition (in transition order).
  QFunctionPtr solve_rewards(const Vec& rewards) const;

  std::size_t n_transitions() const;
  /// phi(s_i, a_i) of every transition, one row each.
  const Mat& transition_features() const;
  const FqiParams& params() const { return params_; }
  bool uses_frozen_structure() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  FqiParams params_;
};

/// One-shot convenience wrapper around FqiProblem.
QFunctionPtr fitted_q_iteration(const BatchDataset& data, FeatureMapPtr phi, const RewardWeights& w, int n_actions,
                                double gamma, int iterations, const RegressorParams& regressor,
                                Encoder encode = nullptr);

}  // namespace admissible::solver
