#pragma once

#include <memory>
#include <string>

#include "admissible/core/policy.hpp"
#include "admissible/core/types.hpp"

namespace admissible::env {

struct EnvStep {
  Vec next_state;
  bool terminal = false;
};

/// Episodic simulator with a discrete action set. Instances are immutable;
/// all randomness comes from the caller's generator, so stepping is a pure
/// function of (state, action, rng state).
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual int n_actions() const = 0;
  virtual Eigen::Index state_dim() const = 0;
  virtual Vec initial_state(Rng& rng) const = 0;
  virtual EnvStep step(const Vec& state, int action, Rng& rng) const = 0;

  /// Start-state distribution for exploratory (expert-training) data.
  virtual Vec exploration_state(Rng& rng) const { return initial_state(rng); }
  /// Regressor input for a state; identity unless the simulator benefits from
  /// a different representation (angles, log scales).
  virtual Vec encode(const Vec& state) const { return state; }
};

using EnvironmentPtr = std::shared_ptr<const Environment>;

/// Q-function over regressor inputs, lifted to raw states through env.encode().
class EncodedActionValue final : public ActionValueFunction {
 public:
  EncodedActionValue(ActionValuePtr q, EnvironmentPtr env) : q_(std::move(q)), env_(std::move(env)) {}
  int n_actions() const override { return q_->n_actions(); }
  Vec values(const Vec& state) const override { return q_->values(env_->encode(state)); }

 private:
  ActionValuePtr q_;
  EnvironmentPtr env_;
};

}  // namespace admissible::env
