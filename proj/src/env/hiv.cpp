#include "admissible/env/hiv.hpp"

#include <cmath>

namespace admissible::env {

void HIVConfig::validate() const {
  if (!(integration_dt > 0.0)) throw ConfigError("hiv integration timestep must be positive");
  if (!(days_per_step > 0.0)) throw ConfigError("hiv days per step must be positive");
  if (!(init_noise >= 0.0)) throw ConfigError("hiv initial noise must be non-negative");
  if (!(rti_efficacy >= 0.0 && rti_efficacy <= 1.0 && pi_efficacy >= 0.0 && pi_efficacy <= 1.0)) {
    throw ConfigError("hiv drug efficacies must lie in [0, 1]");
  }
}

Vec HIVConfig::unhealthy_state() {
  Vec s(6);
  s << 163574.0, 5.0, 11945.0, 46.0, 63919.0, 24.0;
  return s;
}

HIV::HIV(HIVConfig cfg) : cfg_(cfg) { cfg_.validate(); }

Vec HIV::initial_state(Rng& rng) const {
  Vec s = HIVConfig::unhealthy_state();
  if (cfg_.init_noise > 0.0) {
    std::normal_distribution<double> noise(0.0, cfg_.init_noise);
    for (Eigen::Index i = 0; i < s.size(); ++i) s[i] *= std::exp(noise(rng));
  }
  return s;
}

Vec HIV::derivatives(const Vec& y, double eps1, double eps2) const {
  const HIVConfig& p = cfg_;
  const double infected = y[2] + y[3];
  const double inf1 = (1.0 - eps1) * p.k1 * y[4] * y[0];
  const double inf2 = (1.0 - p.f * eps1) * p.k2 * y[4] * y[1];
  Vec dy(6);
  dy[0] = p.lambda1 - p.d1 * y[0] - inf1;
  dy[1] = p.lambda2 - p.d2 * y[1] - inf2;
  dy[2] = inf1 - p.delta * y[2] - p.m1 * y[5] * y[2];
  dy[3] = inf2 - p.delta * y[3] - p.m2 * y[5] * y[3];
  dy[4] = (1.0 - eps2) * p.n_t * p.delta * infected - p.c * y[4] -
          ((1.0 - eps1) * p.rho1 * p.k1 * y[0] + (1.0 - p.f * eps1) * p.rho2 * p.k2 * y[1]) * y[4];
  dy[5] = p.lambda_e + p.b_e * infected / (infected + p.k_b) * y[5] - p.d_e * infected / (infected + p.k_d) * y[5] -
          p.delta_e * y[5];
  return dy;
}

EnvStep HIV::step(const Vec& state, int action, Rng&) const { return step(state, action); }

EnvStep HIV::step(const Vec& state, int action) const {
  if (action < 0 || action > 3) throw ConfigError("invalid hiv action " + std::to_string(action));
  if (state.size() != 6) throw ConfigError("hiv state must have 6 components");
  const double eps1 = (action & 1) ? cfg_.rti_efficacy : 0.0;
  const double eps2 = (action & 2) ? cfg_.pi_efficacy : 0.0;
  const int n = static_cast<int>(std::ceil(cfg_.days_per_step / cfg_.integration_dt - 1e-9));
  const double h = cfg_.days_per_step / n;
  Vec y = state;
  for (int i = 0; i < n; ++i) {
    const Vec k1 = derivatives(y, eps1, eps2);
    const Vec k2 = derivatives(y + 0.5 * h * k1, eps1, eps2);
    const Vec k3 = derivatives(y + 0.5 * h * k2, eps1, eps2);
    const Vec k4 = derivatives(y + h * k3, eps1, eps2);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    y = y.cwiseMax(0.0);
  }
  if (!y.allFinite()) throw NumericalError("hiv integration diverged; reduce the integration timestep");
  return {y, false};
}

Vec HIV::encode(const Vec& state) const { return state.cwiseMax(1e-3).array().log10().matrix(); }

Vec hiv_features(const Vec& state, bool d1, bool d2, const HIVConfig& cfg) {
  if (state.size() != 6) throw ConfigError("hiv state must have 6 components");
  Vec phi(3);
  phi << state[4], cfg.c0 * state[5], cfg.c1 * (d1 ? 1.0 : 0.0) + cfg.c2 * (d2 ? 1.0 : 0.0);
  return phi;
}

double hiv_true_reward(const Vec& state, bool d1, bool d2) {
  const double u1 = 0.7 * (d1 ? 1.0 : 0.0);
  const double u2 = 0.3 * (d2 ? 1.0 : 0.0);
  return -0.1 * state[4] + 1e3 * state[5] - 2e4 * u1 * u1 - 2e3 * u2 * u2;
}

Vec HIVFeatures::operator()(const Vec& state, int action) const {
  return hiv_features(state, (action & 1) != 0, (action & 2) != 0, cfg_);
}

}  // namespace admissible::env
