#pragma once

#include "admissible/core/features.hpp"
#include "admissible/env/environment.hpp"

namespace admissible::env {

/// Two-link underactuated pendulum. State is
/// [theta1, theta2, dtheta1, dtheta2, reached]; as for mountain car the goal
/// is absorbing by default.
struct AcrobotConfig {
  double link_length_1 = 1.0;
  double link_mass_1 = 1.0, link_mass_2 = 1.0;
  double link_com_1 = 0.5, link_com_2 = 0.5;
  double link_moi = 1.0;
  double gravity = 9.8;
  double dt = 0.2;
  double max_vel_1 = 4.0 * 3.14159265358979323846;
  double max_vel_2 = 9.0 * 3.14159265358979323846;
  double goal_height = 1.0;
  double start_noise = 0.1;
  bool absorbing_goal = true;

  void validate() const;
};

class Acrobot final : public Environment {
 public:
  explicit Acrobot(AcrobotConfig cfg = {});
  std::string name() const override { return "acrobot"; }
  int n_actions() const override { return 3; }
  Eigen::Index state_dim() const override { return 5; }
  Vec initial_state(Rng& rng) const override;
  Vec exploration_state(Rng& rng) const override;
  EnvStep step(const Vec& state, int action, Rng& rng) const override;
  /// [cos t1, sin t1, cos t2, sin t2, dt1, dt2, reached].
  Vec encode(const Vec& state) const override;
  const AcrobotConfig& config() const { return cfg_; }

  EnvStep step(const Vec& state, int action) const;
  /// Time derivative of [theta1, theta2, dtheta1, dtheta2] under torque.
  Eigen::Vector4d derivatives(const Eigen::Vector4d& s, double torque) const;
  bool goal_satisfied(const Vec& state) const;

 private:
  AcrobotConfig cfg_;
};

/// [F_cos(cos theta1), F_vel(dtheta1), goal ? +1 : -1].
Vec acrobot_features(double cos_theta1, double dtheta1, bool goal_satisfied, const EmpiricalCdf& cos_cdf,
                     const EmpiricalCdf& vel_cdf);

class AcrobotFeatures final : public FeatureMap {
 public:
  AcrobotFeatures(EmpiricalCdf cos_cdf, EmpiricalCdf vel_cdf);
  static AcrobotFeatures fit(const BatchDataset& data);

  std::string name() const override { return "acrobot_quantile"; }
  Eigen::Index dim() const override { return 3; }
  Eigen::Index state_dim() const override { return 5; }
  Vec operator()(const Vec& state, int action) const override;

  const EmpiricalCdf& cos_cdf() const { return cos_; }
  const EmpiricalCdf& velocity_cdf() const { return vel_; }

 private:
  EmpiricalCdf cos_, vel_;
};

}  // namespace admissible::env
