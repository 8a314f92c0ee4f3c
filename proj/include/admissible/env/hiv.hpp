#pragma once

#include "admissible/core/features.hpp"
#include "admissible/env/environment.hpp"

namespace admissible::env {

/// Six-compartment HIV infection model [T1, T2, T1*, T2*, V, E] with two
/// drugs. Action bits: bit 0 = reverse-transcriptase inhibitor (efficacy
/// rti_efficacy), bit 1 = protease inhibitor (efficacy pi_efficacy).
struct HIVConfig {
  double lambda1 = 10000.0;  // type 1 target cell production
  double d1 = 0.01;          // type 1 death rate
  double k1 = 8.0e-7;        // type 1 infection rate
  double lambda2 = 31.98;
  double d2 = 0.01;
  double f = 0.34;           // RTI efficacy reduction in population 2
  double k2 = 1.0e-4;
  double delta = 0.7;        // infected cell death rate
  double m1 = 1.0e-5, m2 = 1.0e-5;
  double n_t = 100.0;        // virions per infected cell
  double c = 13.0;           // virus clearance
  double rho1 = 1.0, rho2 = 1.0;
  double lambda_e = 1.0;
  double b_e = 0.3, k_b = 100.0;
  double d_e = 0.25, k_d = 500.0;
  double delta_e = 0.1;

  double rti_efficacy = 0.7;
  double pi_efficacy = 0.3;
  double days_per_step = 5.0;
  /// RK4 integration timestep in days; the infection terms get stiff at high viral load.
  double integration_dt = 0.01;
  /// Initial states are the unhealthy steady state times exp(N(0, init_noise)).
  double init_noise = 0.1;

  double c0 = 2000.0;
  double c1 = -24500.0;
  double c2 = -450.0;

  void validate() const;
  static Vec unhealthy_state();
};

class HIV final : public Environment {
 public:
  explicit HIV(HIVConfig cfg = {});
  std::string name() const override { return "hiv"; }
  int n_actions() const override { return 4; }
  Eigen::Index state_dim() const override { return 6; }
  Vec initial_state(Rng& rng) const override;
  EnvStep step(const Vec& state, int action, Rng& rng) const override;
  /// log10 of each compartment.
  Vec encode(const Vec& state) const override;
  const HIVConfig& config() const { return cfg_; }

  EnvStep step(const Vec& state, int action) const;
  Vec derivatives(const Vec& s, double eps1, double eps2) const;

 private:
  HIVConfig cfg_;
};

/// [V, c0 E, c1 d1 + c2 d2].
Vec hiv_features(const Vec& state, bool d1, bool d2, const HIVConfig& cfg = {});

/// -0.1 V + 1e3 E - 2e4 (0.7 d1)^2 - 2e3 (0.3 d2)^2.
double hiv_true_reward(const Vec& state, bool d1, bool d2);

class HIVFeatures final : public FeatureMap {
 public:
  explicit HIVFeatures(HIVConfig cfg = {}) : cfg_(cfg) {}
  std::string name() const override { return "hiv"; }
  Eigen::Index dim() const override { return 3; }
  Eigen::Index state_dim() const override { return 6; }
  Vec operator()(const Vec& state, int action) const override;
  bool uses_action() const override { return true; }

 private:
  HIVConfig cfg_;
};

}  // namespace admissible::env
