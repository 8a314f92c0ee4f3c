#pragma once

#include <functional>
#include <ostream>

#include "admissible/core/features.hpp"
#include "admissible/core/policy.hpp"

namespace admissible::ope {

struct FeatureExpectationEstimate {
  Vec mean;            // mu-hat
  Mat per_trajectory;  // N x k, row n = mu-hat^(n)
  std::size_t n_trajectories = 0;
};

struct PdisOptions {
  /// Upper clip on the cumulative ratio rho_t; 0 disables clipping.
  double rho_clip = 0.0;
  int jobs = 1;
};

/// Per-decision importance sampling: row n is sum_t gamma^t rho_t phi(s_t, a_t)
/// with rho_t the cumulative product of pi/pi_b up to and including step t.
/// If `trajectory_rho` is given it receives the whole-trajectory weights
/// (same values as trajectory_weights) from the same pass.
FeatureExpectationEstimate pdis_mu(const BatchDataset& data, const Policy& pi, const FeatureMap& phi, double gamma,
                                   const PdisOptions& options = {}, Vec* trajectory_rho = nullptr);

/// Whole-trajectory importance weights prod_t pi(a_t|s_t)/pi_b(a_t|s_t).
Vec trajectory_weights(const BatchDataset& data, const Policy& pi, const PdisOptions& options = {});

using RewardFn = std::function<double(const Vec& state, int action)>;

/// Scalar PDIS estimate of the value of pi under an arbitrary reward.
double pdis_value(const BatchDataset& data, const Policy& pi, const RewardFn& reward, double gamma,
                  const PdisOptions& options = {});

struct BoundConfig {
  double delta = 0.05;  // confidence
  double b = 1.0;       // value ceiling

  void validate() const;
};

/// sum over ordered pairs (n, n') of (x_n - x_n')^2; exactly 0 for constant input.
double ordered_pair_sum(const Vec& x);

/// (1/N) sqrt(ln(2/delta)/(N-1) * sum_{n,n'} (V_n - V_n')^2).
double bernstein_deviation(const Vec& values, double delta);

/// 7 b ln(2/delta) / (3 (N-1)).
double bernstein_range_term(std::size_t n, const BoundConfig& cfg);

/// mean - bernstein_deviation - bernstein_range_term.
double bernstein_lower_bound(const Vec& values, const BoundConfig& cfg);

/// Coordinate-wise lower bound on mu chosen by the sign of w: mean_k minus the
/// coordinate's deviation term where w_k >= 0, plus it where w_k < 0.
Vec mu_lower_bound(const FeatureExpectationEstimate& est, const RewardWeights& w, const BoundConfig& cfg);

/// (sum rho)^2 / sum rho^2.
double kish_ess(const Vec& rho);

/// max over logged (s, a) of |phi|_inf, times 1/(1 - gamma) (or the longest
/// trajectory length when gamma = 1). Bounds |w'mu| for any |w|_1 = 1.
double default_value_ceiling(const BatchDataset& data, const FeatureMap& phi, double gamma);

struct OpeReport {
  RewardWeights w;
  double v_hat = 0.0;
  double v_lb = 0.0;
  double n_eff = 0.0;
  Vec mu_hat;
  Vec mu_lb;
};

OpeReport make_report(const FeatureExpectationEstimate& est, const Vec& rho, const RewardWeights& w,
                      const BoundConfig& cfg);

/// Columns: w1..wk, V_hat, V_lb, N_eff, mu_hat_1..k, mu_lb_1..k.
void write_ope_csv_header(std::ostream& out, Eigen::Index k);
void write_ope_csv_row(std::ostream& out, const OpeReport& r);

}  // namespace admissible::ope
