#include "admissible/env/mountain_car.hpp"

#include <algorithm>
#include <cmath>

namespace admissible::env {

void MountainCarConfig::validate() const {
  if (!(max_position > min_position)) throw ConfigError("mountain car position range is empty");
  if (!(max_speed > 0.0)) throw ConfigError("mountain car max speed must be positive");
  if (!(start_high >= start_low)) throw ConfigError("mountain car start interval is empty");
}

MountainCar::MountainCar(MountainCarConfig cfg) : cfg_(cfg) { cfg_.validate(); }

Vec MountainCar::initial_state(Rng& rng) const {
  Vec s(3);
  s << std::uniform_real_distribution<double>(cfg_.start_low, cfg_.start_high)(rng), 0.0, 0.0;
  return s;
}

Vec MountainCar::exploration_state(Rng& rng) const {
  Vec s(3);
  s << std::uniform_real_distribution<double>(cfg_.min_position, cfg_.goal_position)(rng),
      std::uniform_real_distribution<double>(-cfg_.max_speed, cfg_.max_speed)(rng), 0.0;
  return s;
}

EnvStep MountainCar::step(const Vec& state, int action, Rng&) const { return step(state, action); }

EnvStep MountainCar::step(const Vec& state, int action) const {
  if (action < 0 || action > 2) throw ConfigError("invalid mountain car action " + std::to_string(action));
  if (state.size() != 3) throw ConfigError("mountain car state must be [position, velocity, reached]");
  if (state[2] > 0.5) return {state, !cfg_.absorbing_goal};

  double v = state[1] + (action - 1) * cfg_.force - std::cos(3.0 * state[0]) * cfg_.gravity;
  v = std::clamp(v, -cfg_.max_speed, cfg_.max_speed);
  double x = std::clamp(state[0] + v, cfg_.min_position, cfg_.max_position);
  if (x == cfg_.min_position && v < 0.0) v = 0.0;
  const bool reached = x >= cfg_.goal_position;
  Vec next(3);
  next << x, v, reached ? 1.0 : 0.0;
  return {next, reached && !cfg_.absorbing_goal};
}

Vec mountain_car_features(double position, double velocity, bool goal_reached, const EmpiricalCdf& pos_cdf,
                          const EmpiricalCdf& vel_cdf) {
  if (!pos_cdf.fitted() || !vel_cdf.fitted()) throw ConfigError("mountain car quantile transforms are not fitted");
  Vec phi(3);
  phi << pos_cdf(position), vel_cdf(velocity), goal_reached ? 1.0 : -1.0;
  return phi;
}

MountainCarFeatures::MountainCarFeatures(EmpiricalCdf pos_cdf, EmpiricalCdf vel_cdf)
    : pos_(std::move(pos_cdf)), vel_(std::move(vel_cdf)) {
  if (!pos_.fitted() || !vel_.fitted()) throw ConfigError("mountain car quantile transforms are not fitted");
}

MountainCarFeatures MountainCarFeatures::fit(const BatchDataset& data) {
  if (data.state_dim() != 3) throw ConfigError("mountain car features need 3-dimensional states");
  std::vector<double> pos, vel;
  pos.reserve(data.total_steps());
  vel.reserve(data.total_steps());
  for (const auto& tr : data) {
    for (const auto& s : tr.states()) {
      pos.push_back(s[0]);
      vel.push_back(s[1]);
    }
  }
  return {EmpiricalCdf(pos), EmpiricalCdf(vel)};
}

Vec MountainCarFeatures::operator()(const Vec& state, int) const {
  return mountain_car_features(state[0], state[1], state[2] > 0.5, pos_, vel_);
}

}  // namespace admissible::env
