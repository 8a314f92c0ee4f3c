#pragma once

#include "admissible/core/features.hpp"
#include "admissible/env/environment.hpp"

namespace admissible::env {

/// Classic mountain car. State is [position, velocity, reached] where
/// `reached` is 1 once the goal has been hit. With `absorbing_goal` the car
/// then stays put for the rest of the episode instead of terminating, so
/// every logged trajectory has the full horizon.
struct MountainCarConfig {
  double force = 0.001;
  double gravity = 0.0025;
  double min_position = -1.2, max_position = 0.6;
  double max_speed = 0.07;
  double goal_position = 0.5;
  double start_low = -0.6, start_high = -0.4;
  bool absorbing_goal = true;

  void validate() const;
};

class MountainCar final : public Environment {
 public:
  explicit MountainCar(MountainCarConfig cfg = {});
  std::string name() const override { return "mountain_car"; }
  int n_actions() const override { return 3; }
  Eigen::Index state_dim() const override { return 3; }
  Vec initial_state(Rng& rng) const override;
  Vec exploration_state(Rng& rng) const override;
  EnvStep step(const Vec& state, int action, Rng& rng) const override;
  const MountainCarConfig& config() const { return cfg_; }

  /// Deterministic dynamics (the simulator has no noise).
  EnvStep step(const Vec& state, int action) const;

 private:
  MountainCarConfig cfg_;
};

/// [F_pos(position), F_vel(velocity), goal ? +1 : -1].
Vec mountain_car_features(double position, double velocity, bool goal_reached, const EmpiricalCdf& pos_cdf,
                          const EmpiricalCdf& vel_cdf);

class MountainCarFeatures final : public FeatureMap {
 public:
  MountainCarFeatures(EmpiricalCdf pos_cdf, EmpiricalCdf vel_cdf);
  /// Fits both CDFs on every logged state of the batch.
  static MountainCarFeatures fit(const BatchDataset& data);

  std::string name() const override { return "mountain_car_quantile"; }
  Eigen::Index dim() const override { return 3; }
  Eigen::Index state_dim() const override { return 3; }
  Vec operator()(const Vec& state, int action) const override;

  const EmpiricalCdf& position_cdf() const { return pos_; }
  const EmpiricalCdf& velocity_cdf() const { return vel_; }

 private:
  EmpiricalCdf pos_, vel_;
};

}  // namespace admissible::env
