#include "admissible/env/map2d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace admissible::env {

void Map2DConfig::validate() const {
  const bool finite = std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) && std::isfinite(y_max);
  if (!finite || !(x_max > x_min) || !(y_max > y_min)) throw ConfigError("map2d bounds must be finite and non-empty");
  if (!(step_mean > 0.0)) throw ConfigError("map2d mean step must be positive");
  if (!(step_std >= 0.0)) throw ConfigError("map2d step deviation must be non-negative");
  if (!(start_high >= start_low)) throw ConfigError("map2d start interval is empty");
}

Vec map2d_move(const Vec& state, int action, double delta, const Map2DConfig& cfg) {
  if (state.size() != 2) throw ConfigError("map2d state must be two-dimensional");
  Vec next = state;
  switch (action) {
    case kUp: next[1] += delta; break;
    case kDown: next[1] -= delta; break;
    case kLeft: next[0] -= delta; break;
    case kRight: next[0] += delta; break;
    default: {
      std::ostringstream msg;
      msg << "invalid map2d action " << action << " (expected 0..3)";
      throw ConfigError(msg.str());
    }
  }
  next[0] = std::clamp(next[0], cfg.x_min, cfg.x_max);
  next[1] = std::clamp(next[1], cfg.y_min, cfg.y_max);
  return next;
}

double map2d_draw_step(const Map2DConfig& cfg, Rng& rng) {
  std::normal_distribution<double> dist(cfg.step_mean, cfg.step_std);
  double delta = dist(rng);
  while (delta < 0.0) delta = dist(rng);
  return delta;
}

EnvStep map2d_step(const Vec& state, int action, Rng& rng, const Map2DConfig& cfg) {
  if (action < 0 || action > 3) {
    std::ostringstream msg;
    msg << "invalid map2d action " << action << " (expected 0..3)";
    throw ConfigError(msg.str());
  }
  return {map2d_move(state, action, map2d_draw_step(cfg, rng), cfg), false};
}

double map2d_true_reward(const Vec& state) { return 0.5 * state[0] + 0.5 * state[1]; }

Map2D::Map2D(Map2DConfig cfg) : cfg_(cfg) { cfg_.validate(); }

Vec Map2D::initial_state(Rng& rng) const {
  std::uniform_real_distribution<double> u(cfg_.start_low, cfg_.start_high);
  Vec s(2);
  s[0] = std::clamp(u(rng), cfg_.x_min, cfg_.x_max);
  s[1] = std::clamp(u(rng), cfg_.y_min, cfg_.y_max);
  return s;
}

Vec Map2D::exploration_state(Rng& rng) const {
  Vec s(2);
  s[0] = std::uniform_real_distribution<double>(cfg_.x_min, cfg_.x_max)(rng);
  s[1] = std::uniform_real_distribution<double>(cfg_.y_min, cfg_.y_max)(rng);
  return s;
}

EnvStep Map2D::step(const Vec& state, int action, Rng& rng) const { return map2d_step(state, action, rng, cfg_); }

}  // namespace admissible::env
