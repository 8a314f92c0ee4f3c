#include "admissible/env/acrobot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace admissible::env {

namespace {

double wrap_angle(double x) {
  constexpr double pi = std::numbers::pi;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  while (x > pi) x -= two_pi;
  while (x < -pi) x += two_pi;
  return x;
}

}  // namespace

void AcrobotConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("acrobot timestep must be positive");
  if (!(link_mass_1 > 0.0 && link_mass_2 > 0.0 && link_moi > 0.0)) throw ConfigError("acrobot masses must be positive");
  if (!(max_vel_1 > 0.0 && max_vel_2 > 0.0)) throw ConfigError("acrobot velocity limits must be positive");
  if (!(start_noise >= 0.0)) throw ConfigError("acrobot start noise must be non-negative");
}

Acrobot::Acrobot(AcrobotConfig cfg) : cfg_(cfg) { cfg_.validate(); }

Vec Acrobot::initial_state(Rng& rng) const {
  std::uniform_real_distribution<double> u(-cfg_.start_noise, cfg_.start_noise);
  Vec s(5);
  for (int i = 0; i < 4; ++i) s[i] = u(rng);
  s[4] = 0.0;
  return s;
}

Vec Acrobot::exploration_state(Rng& rng) const {
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  Vec s(5);
  s << angle(rng), angle(rng), std::uniform_real_distribution<double>(-cfg_.max_vel_1, cfg_.max_vel_1)(rng) / 4.0,
      std::uniform_real_distribution<double>(-cfg_.max_vel_2, cfg_.max_vel_2)(rng) / 4.0, 0.0;
  if (goal_satisfied(s)) s[4] = 1.0;
  return s;
}

Eigen::Vector4d Acrobot::derivatives(const Eigen::Vector4d& s, double torque) const {
  const double m1 = cfg_.link_mass_1, m2 = cfg_.link_mass_2;
  const double l1 = cfg_.link_length_1;
  const double lc1 = cfg_.link_com_1, lc2 = cfg_.link_com_2;
  const double i1 = cfg_.link_moi, i2 = cfg_.link_moi;
  const double g = cfg_.gravity;
  const double theta1 = s[0], theta2 = s[1], dtheta1 = s[2], dtheta2 = s[3];
  constexpr double half_pi = std::numbers::pi / 2.0;

  const double d1 = m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(theta2)) + i1 + i2;
  const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(theta2)) + i2;
  const double phi2 = m2 * lc2 * g * std::cos(theta1 + theta2 - half_pi);
  const double phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * std::sin(theta2) -
                      2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * std::sin(theta2) +
                      (m1 * lc1 + m2 * l1) * g * std::cos(theta1 - half_pi) + phi2;
  const double ddtheta2 = (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * std::sin(theta2) - phi2) /
                          (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
  const double ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
  return {dtheta1, dtheta2, ddtheta1, ddtheta2};
}

bool Acrobot::goal_satisfied(const Vec& state) const {
  return -std::cos(state[0]) - std::cos(state[1] + state[0]) > cfg_.goal_height;
}

EnvStep Acrobot::step(const Vec& state, int action, Rng&) const { return step(state, action); }

EnvStep Acrobot::step(const Vec& state, int action) const {
  if (action < 0 || action > 2) throw ConfigError("invalid acrobot action " + std::to_string(action));
  if (state.size() != 5) throw ConfigError("acrobot state must have 5 components");
  if (state[4] > 0.5) return {state, !cfg_.absorbing_goal};

  const double torque = static_cast<double>(action - 1);
  const double h = cfg_.dt;
  const Eigen::Vector4d y0 = state.head<4>();
  const Eigen::Vector4d k1 = derivatives(y0, torque);
  const Eigen::Vector4d k2 = derivatives(y0 + 0.5 * h * k1, torque);
  const Eigen::Vector4d k3 = derivatives(y0 + 0.5 * h * k2, torque);
  const Eigen::Vector4d k4 = derivatives(y0 + h * k3, torque);
  const Eigen::Vector4d y = y0 + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  Vec next(5);
  next[0] = wrap_angle(y[0]);
  next[1] = wrap_angle(y[1]);
  next[2] = std::clamp(y[2], -cfg_.max_vel_1, cfg_.max_vel_1);
  next[3] = std::clamp(y[3], -cfg_.max_vel_2, cfg_.max_vel_2);
  next[4] = 0.0;
  const bool reached = goal_satisfied(next);
  if (reached) next[4] = 1.0;
  return {next, reached && !cfg_.absorbing_goal};
}

Vec Acrobot::encode(const Vec& state) const {
  Vec x(7);
  x << std::cos(state[0]), std::sin(state[0]), std::cos(state[1]), std::sin(state[1]), state[2], state[3], state[4];
  return x;
}

Vec acrobot_features(double cos_theta1, double dtheta1, bool goal_satisfied, const EmpiricalCdf& cos_cdf,
                     const EmpiricalCdf& vel_cdf) {
  if (!cos_cdf.fitted() || !vel_cdf.fitted()) throw ConfigError("acrobot quantile transforms are not fitted");
  Vec phi(3);
  phi << cos_cdf(cos_theta1), vel_cdf(dtheta1), goal_satisfied ? 1.0 : -1.0;
  return phi;
}

AcrobotFeatures::AcrobotFeatures(EmpiricalCdf cos_cdf, EmpiricalCdf vel_cdf)
    : cos_(std::move(cos_cdf)), vel_(std::move(vel_cdf)) {
  if (!cos_.fitted() || !vel_.fitted()) throw ConfigError("acrobot quantile transforms are not fitted");
}

AcrobotFeatures AcrobotFeatures::fit(const BatchDataset& data) {
  if (data.state_dim() != 5) throw ConfigError("acrobot features need 5-dimensional states");
  std::vector<double> cosines, vel;
  cosines.reserve(data.total_steps());
  vel.reserve(data.total_steps());
  for (const auto& tr : data) {
    for (const auto& s : tr.states()) {
      cosines.push_back(std::cos(s[0]));
      vel.push_back(s[2]);
    }
  }
  return {EmpiricalCdf(cosines), EmpiricalCdf(vel)};
}

Vec AcrobotFeatures::operator()(const Vec& state, int) const {
  return acrobot_features(std::cos(state[0]), state[2], state[4] > 0.5, cos_, vel_);
}

}  // namespace admissible::env
