#include "admissible/polytope/oracle.hpp"

#include <cmath>
#include <sstream>

#include "admissible/core/dataset_io.hpp"

namespace admissible::polytope {

void Thresholds::validate() const {
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
  if (!(delta_cap >= 0.0)) throw ConfigError("delta_cap must be non-negative");
  bound.validate();
}

double Halfspace::violation(const Vec& w) const {
  const double v = normal.dot(w);
  return sense == Sense::kLessEqual ? v - offset : offset - v;
}

Halfspace Halfspace::as_less_equal() const {
  if (sense == Sense::kLessEqual) return *this;
  return {-normal, -offset, Sense::kLessEqual};
}

std::string Halfspace::describe() const {
  std::ostringstream out;
  out << "{w : [";
  for (Eigen::Index i = 0; i < normal.size(); ++i) out << (i ? ", " : "") << format_real(normal[i]);
  out << "]'w " << (sense == Sense::kLessEqual ? "<=" : ">=") << " " << format_real(offset) << "}";
  return out.str();
}

std::string to_string(Violation v) {
  switch (v) {
    case Violation::kNone: return "none";
    case Violation::kConsistencyLower: return "consistency-lower";
    case Violation::kConsistencyUpper: return "consistency-upper";
    case Violation::kEvaluability: return "evaluability";
  }
  return "none";
}

namespace {

void check_dims(const RewardWeights& w, const Vec& a, const Vec& b) {
  if (a.size() != w.dim() || b.size() != w.dim()) throw ConfigError("weight and feature-expectation dimensions differ");
}

Halfspace lower_cut(const Vec& mu, const Vec& mu_b, double epsilon) {
  return {std::abs(1.0 + epsilon) * mu - mu_b, 0.0, Sense::kGreaterEqual};
}

Halfspace upper_cut(const Vec& mu, const Vec& mu_b, double epsilon) {
  return {std::abs(1.0 - epsilon) * mu - mu_b, 0.0, Sense::kLessEqual};
}

Halfspace evaluability_cut(const Vec& mu, const Vec& mu_lb, double delta_cap) {
  return {(1.0 - delta_cap) * mu - mu_lb, 0.0, Sense::kGreaterEqual};
}

}  // namespace

OracleVerdict consistency_check(const RewardWeights& w, const Vec& mu, const Vec& mu_b, double epsilon) {
  check_dims(w, mu, mu_b);
  OracleVerdict v;
  v.diagnostics.w_mu = w.values().dot(mu);
  v.diagnostics.w_mu_b = w.values().dot(mu_b);
  v.diagnostics.negative_behavior_value = v.diagnostics.w_mu_b < 0.0;
  const double wm = v.diagnostics.w_mu, wb = v.diagnostics.w_mu_b;
  if (std::abs(1.0 + epsilon) * wm < wb) {
    v.accepted = false;
    v.violated = Violation::kConsistencyLower;
    v.halfspace = lower_cut(mu, mu_b, epsilon);
  } else if (std::abs(1.0 - epsilon) * wm > wb) {
    v.accepted = false;
    v.violated = Violation::kConsistencyUpper;
    v.halfspace = upper_cut(mu, mu_b, epsilon);
  }
  return v;
}

OracleVerdict evaluability_check(const RewardWeights& w, const Vec& mu, const Vec& mu_lb, double delta_cap) {
  check_dims(w, mu, mu_lb);
  OracleVerdict v;
  v.diagnostics.w_mu = w.values().dot(mu);
  v.diagnostics.w_mu_lb = w.values().dot(mu_lb);
  if ((1.0 - delta_cap) * v.diagnostics.w_mu < v.diagnostics.w_mu_lb) {
    v.accepted = false;
    v.violated = Violation::kEvaluability;
    v.halfspace = evaluability_cut(mu, mu_lb, delta_cap);
  }
  return v;
}

PolicyEvaluation exact_evaluation(Policy policy, const Vec& mu) {
  PolicyEvaluation e;
  e.policy = std::move(policy);
  e.estimate.mean = mu;
  e.estimate.per_trajectory = mu.transpose().replicate(2, 1);
  e.estimate.n_trajectories = 2;
  return e;
}

OracleVerdict judge(const RewardWeights& w, const ope::FeatureExpectationEstimate& estimate, const Vec& mu_b,
                    const Thresholds& thresholds) {
  thresholds.validate();
  const Vec& mu = estimate.mean;
  const Vec mu_lb = ope::mu_lower_bound(estimate, w, thresholds.bound);
  OracleVerdict out = consistency_check(w, mu, mu_b, thresholds.epsilon);
  out.diagnostics.w_mu_lb = w.values().dot(mu_lb);
  if (!thresholds.enable_consistency) {
    out.accepted = true;
    out.violated = Violation::kNone;
    out.halfspace.reset();
  }
  if (out.accepted && thresholds.enable_evaluability) {
    const OracleVerdict e = evaluability_check(w, mu, mu_lb, thresholds.delta_cap);
    out.accepted = e.accepted;
    out.violated = e.violated;
    out.halfspace = e.halfspace;
  }
  return out;
}

OracleVerdict separation_oracle(const RewardWeights& w, const SolverFn& solver, const Vec& mu_b,
                                const Thresholds& thresholds) {
  const PolicyEvaluation eval = solver(w);
  return judge(w, eval.estimate, mu_b, thresholds);
}

std::vector<std::pair<Violation, Halfspace>> violated_constraints(const RewardWeights& w, const Vec& mu,
                                                                  const Vec& mu_lb, const Vec& mu_b,
                                                                  const Thresholds& thresholds) {
  check_dims(w, mu, mu_b);
  std::vector<std::pair<Violation, Halfspace>> out;
  const double wm = w.values().dot(mu);
  if (thresholds.enable_consistency) {
    const double wb = w.values().dot(mu_b);
    if (std::abs(1.0 + thresholds.epsilon) * wm < wb) {
      out.emplace_back(Violation::kConsistencyLower, lower_cut(mu, mu_b, thresholds.epsilon));
    }
    if (std::abs(1.0 - thresholds.epsilon) * wm > wb) {
      out.emplace_back(Violation::kConsistencyUpper, upper_cut(mu, mu_b, thresholds.epsilon));
    }
  }
  if (thresholds.enable_evaluability && (1.0 - thresholds.delta_cap) * wm < w.values().dot(mu_lb)) {
    out.emplace_back(Violation::kEvaluability, evaluability_cut(mu, mu_lb, thresholds.delta_cap));
  }
  return out;
}

}  // namespace admissible::polytope
