#include "admissible/ope/ope.hpp"

#include <cmath>

#include "admissible/core/dataset_io.hpp"
#include "admissible/env/collect.hpp"

namespace admissible::ope {

namespace {

double step_ratio(const Trajectory& tr, std::size_t t, const Policy& pi) {
  const double pb = tr.behavior_probs()[t];
  if (!(pb > 0.0)) throw ConfigError("zero behaviour probability in logged data");
  const double r = pi.action_prob(tr.states()[t], tr.actions()[t]) / pb;
  if (!std::isfinite(r)) throw NumericalError("non-finite importance ratio");
  return r;
}

double clip(double rho, const PdisOptions& o) { return o.rho_clip > 0.0 ? std::min(rho, o.rho_clip) : rho; }

}  // namespace

FeatureExpectationEstimate pdis_mu(const BatchDataset& data, const Policy& pi, const FeatureMap& phi, double gamma,
                                   const PdisOptions& options, Vec* trajectory_rho) {
  check_gamma(gamma);
  if (phi.state_dim() != data.state_dim()) throw ConfigError("feature map does not match the dataset state dimension");
  const std::size_t n = data.size();
  FeatureExpectationEstimate est;
  est.n_trajectories = n;
  est.per_trajectory = Mat::Zero(static_cast<Eigen::Index>(n), phi.dim());
  if (trajectory_rho) trajectory_rho->resize(static_cast<Eigen::Index>(n));
  env::parallel_for(n, options.jobs, [&](std::size_t i) {
    const Trajectory& tr = data[i];
    Vec acc = Vec::Zero(phi.dim());
    double rho = 1.0;
    double discount = 1.0;
    for (std::size_t t = 0; t < tr.length(); ++t) {
      rho = clip(rho * step_ratio(tr, t, pi), options);
      if (rho == 0.0) break;
      acc += (discount * rho) * phi(tr.states()[t], tr.actions()[t]);
      discount *= gamma;
    }
    if (!acc.allFinite()) throw NumericalError("non-finite PDIS estimate");
    if (trajectory_rho) (*trajectory_rho)[static_cast<Eigen::Index>(i)] = rho;
    est.per_trajectory.row(static_cast<Eigen::Index>(i)) = acc.transpose();
  });
  est.mean = est.per_trajectory.colwise().mean().transpose();
  return est;
}

Vec trajectory_weights(const BatchDataset& data, const Policy& pi, const PdisOptions& options) {
  Vec rho(static_cast<Eigen::Index>(data.size()));
  env::parallel_for(data.size(), options.jobs, [&](std::size_t i) {
    const Trajectory& tr = data[i];
    double r = 1.0;
    for (std::size_t t = 0; t < tr.length() && r != 0.0; ++t) r = clip(r * step_ratio(tr, t, pi), options);
    rho[static_cast<Eigen::Index>(i)] = r;
  });
  return rho;
}

double pdis_value(const BatchDataset& data, const Policy& pi, const RewardFn& reward, double gamma,
                  const PdisOptions& options) {
  check_gamma(gamma);
  Vec per(static_cast<Eigen::Index>(data.size()));
  env::parallel_for(data.size(), options.jobs, [&](std::size_t i) {
    const Trajectory& tr = data[i];
    double acc = 0.0, rho = 1.0, discount = 1.0;
    for (std::size_t t = 0; t < tr.length(); ++t) {
      rho = clip(rho * step_ratio(tr, t, pi), options);
      if (rho == 0.0) break;
      acc += discount * rho * reward(tr.states()[t], tr.actions()[t]);
      discount *= gamma;
    }
    per[static_cast<Eigen::Index>(i)] = acc;
  });
  return per.mean();
}

void BoundConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("confidence delta must lie in (0, 1)");
  if (!(b > 0.0)) throw ConfigError("value ceiling b must be positive");
}

double ordered_pair_sum(const Vec& x) {
  const auto n = static_cast<double>(x.size());
  if (x.size() == 0) return 0.0;
  const Vec d = x.array() - x[0];
  const double s = d.sum();
  return std::max(0.0, 2.0 * (n * d.squaredNorm() - s * s));
}

double bernstein_deviation(const Vec& values, double delta) {
  if (values.size() < 2) throw ConfigError("the Bernstein bound needs at least two values");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("confidence delta must lie in (0, 1)");
  const auto n = static_cast<double>(values.size());
  const double c1 = std::log(2.0 / delta) / (n - 1.0);
  return std::sqrt(c1 * ordered_pair_sum(values)) / n;
}

double bernstein_range_term(std::size_t n, const BoundConfig& cfg) {
  cfg.validate();
  if (n < 2) throw ConfigError("the Bernstein bound needs at least two values");
  return 7.0 * cfg.b * std::log(2.0 / cfg.delta) / (3.0 * (static_cast<double>(n) - 1.0));
}

double bernstein_lower_bound(const Vec& values, const BoundConfig& cfg) {
  cfg.validate();
  if (values.size() < 2) throw ConfigError("the Bernstein bound needs at least two values");
  return values.mean() - bernstein_deviation(values, cfg.delta) -
         bernstein_range_term(static_cast<std::size_t>(values.size()), cfg);
}

Vec mu_lower_bound(const FeatureExpectationEstimate& est, const RewardWeights& w, const BoundConfig& cfg) {
  cfg.validate();
  if (w.dim() != est.mean.size()) throw ConfigError("reward weights do not match the estimate dimension");
  if (est.per_trajectory.rows() < 2) throw ConfigError("the Bernstein bound needs at least two trajectories");
  Vec lb(est.mean.size());
  for (Eigen::Index k = 0; k < lb.size(); ++k) {
    const double dev = bernstein_deviation(est.per_trajectory.col(k), cfg.delta);
    lb[k] = w[k] >= 0.0 ? est.mean[k] - dev : est.mean[k] + dev;
  }
  return lb;
}

double kish_ess(const Vec& rho) {
  if (rho.size() == 0) throw ConfigError("kish_ess needs at least one weight");
  if ((rho.array() < 0.0).any()) throw ConfigError("importance weights must be non-negative");
  const double sq = rho.squaredNorm();
  if (sq == 0.0) throw ConfigError("all importance weights are zero");
  const double s = rho.sum();
  if (!std::isfinite(s) || !std::isfinite(sq)) throw NumericalError("importance weights overflow");
  return s * s / sq;
}

double default_value_ceiling(const BatchDataset& data, const FeatureMap& phi, double gamma) {
  check_gamma(gamma);
  double m = 0.0;
  std::size_t longest = 0;
  for (const auto& tr : data) {
    longest = std::max(longest, tr.length());
    for (std::size_t t = 0; t < tr.length(); ++t) {
      m = std::max(m, phi(tr.states()[t], tr.actions()[t]).cwiseAbs().maxCoeff());
    }
  }
  const double horizon = gamma < 1.0 ? 1.0 / (1.0 - gamma) : static_cast<double>(longest);
  const double b = m * horizon;
  return b > 0.0 ? b : 1.0;
}

OpeReport make_report(const FeatureExpectationEstimate& est, const Vec& rho, const RewardWeights& w,
                      const BoundConfig& cfg) {
  OpeReport r;
  r.w = w;
  r.mu_hat = est.mean;
  r.mu_lb = mu_lower_bound(est, w, cfg);
  r.v_hat = w.values().dot(est.mean);
  r.v_lb = bernstein_lower_bound(est.per_trajectory * w.values(), cfg);
  r.n_eff = (rho.array() > 0.0).any() ? kish_ess(rho) : 0.0;
  return r;
}

void write_ope_csv_header(std::ostream& out, Eigen::Index k) {
  for (Eigen::Index i = 1; i <= k; ++i) out << "w" << i << ",";
  out << "V_hat,V_lb,N_eff";
  for (Eigen::Index i = 1; i <= k; ++i) out << ",mu_hat_" << i;
  for (Eigen::Index i = 1; i <= k; ++i) out << ",mu_lb_" << i;
  out << "\n";
}

void write_ope_csv_row(std::ostream& out, const OpeReport& r) {
  for (Eigen::Index i = 0; i < r.w.dim(); ++i) out << format_real(r.w[i]) << ",";
  out << format_real(r.v_hat) << "," << format_real(r.v_lb) << "," << format_real(r.n_eff);
  for (Eigen::Index i = 0; i < r.mu_hat.size(); ++i) out << "," << format_real(r.mu_hat[i]);
  for (Eigen::Index i = 0; i < r.mu_lb.size(); ++i) out << "," << format_real(r.mu_lb[i]);
  out << "\n";
}

}  // namespace admissible::ope
