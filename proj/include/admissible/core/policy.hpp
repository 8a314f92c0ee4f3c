#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "admissible/core/types.hpp"

namespace admissible {

/// Q(s, .) over a finite action set.
class ActionValueFunction {
 public:
  virtual ~ActionValueFunction() = default;
  virtual int n_actions() const = 0;
  virtual Vec values(const Vec& state) const = 0;
};

using ActionValuePtr = std::shared_ptr<const ActionValueFunction>;

/// softmax(q / temperature), computed with the max subtracted. Entries equal
/// to -inf get probability zero.
Vec boltzmann_action_probs(const Vec& q_values, double temperature);

/// Inverse-CDF draw from a probability vector; zero-probability actions are
/// never returned.
int sample_action(const Vec& probs, Rng& rng);

/// Index of the largest entry; ties go to the lowest index.
int argmax_lowest(const Vec& values);

/// Stochastic or deterministic policy over a discrete action set.
///
/// Variants: deterministic (state -> action), Boltzmann over an action-value
/// function, uniform mixture of member policies, and epsilon-biased (with
/// probability beta take a fixed bias action, otherwise follow the base).
class Policy {
 public:
  using ActionFn = std::function<int(const Vec&)>;

  static Policy deterministic(int n_actions, ActionFn act, std::string description = "deterministic");
  /// Greedy (argmax, lowest-index ties) over q.
  static Policy greedy(ActionValuePtr q, std::string description = "greedy");
  static Policy boltzmann(ActionValuePtr q, double temperature, std::string description = "boltzmann");
  static Policy uniform(int n_actions);
  static Policy mixture(std::vector<Policy> members);
  static Policy epsilon_biased(Policy base, int bias_action, double beta);

  int n_actions() const;
  Vec action_probs(const Vec& state) const;
  double action_prob(const Vec& state, int action) const { return action_probs(state)[action]; }
  int sample(const Vec& state, Rng& rng) const;
  std::string describe() const;

  struct Impl;

 private:
  explicit Policy(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

}  // namespace admissible
