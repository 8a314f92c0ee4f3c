#pragma once

#include "admissible/env/environment.hpp"

namespace admissible::env {

enum Map2DAction : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

struct Map2DConfig {
  double x_min = 0.0, x_max = 10.0;
  double y_min = 0.0, y_max = 10.0;
  double step_mean = 0.4;
  double step_std = 0.1;
  /// Start states are uniform on [start_low, start_high]^2 (clipped to bounds).
  double start_low = 0.0;
  double start_high = 2.0;

  void validate() const;
};

/// Deterministic part of a move: displace by `delta` in the action's
/// direction and clip to the box.
Vec map2d_move(const Vec& state, int action, double delta, const Map2DConfig& cfg);

/// Draws delta ~ N(step_mean, step_std), redrawing negative values.
double map2d_draw_step(const Map2DConfig& cfg, Rng& rng);

EnvStep map2d_step(const Vec& state, int action, Rng& rng, const Map2DConfig& cfg = {});

/// True reward of the illustration task: [0.5, 0.5]'s.
double map2d_true_reward(const Vec& state);

class Map2D final : public Environment {
 public:
  explicit Map2D(Map2DConfig cfg = {});
  std::string name() const override { return "map2d"; }
  int n_actions() const override { return 4; }
  Eigen::Index state_dim() const override { return 2; }
  Vec initial_state(Rng& rng) const override;
  Vec exploration_state(Rng& rng) const override;
  EnvStep step(const Vec& state, int action, Rng& rng) const override;
  const Map2DConfig& config() const { return cfg_; }

 private:
  Map2DConfig cfg_;
};

}  // namespace admissible::env
