#pragma once

#include <functional>
#include <optional>
#include <string>

#include "admissible/core/policy.hpp"
#include "admissible/ope/ope.hpp"

namespace admissible::polytope {

struct Thresholds {
  double epsilon = 1.0;    // consistency slack
  double delta_cap = 1.0;  // evaluability slack
  ope::BoundConfig bound;
  bool enable_consistency = true;
  bool enable_evaluability = true;

  void validate() const;
};

enum class Sense { kLessEqual, kGreaterEqual };

/// {w : normal'w <= offset} or {w : normal'w >= offset}.
struct Halfspace {
  Vec normal;
  double offset = 0.0;
  Sense sense = Sense::kLessEqual;

  /// Signed amount by which w violates the constraint (<= 0 when satisfied).
  double violation(const Vec& w) const;
  bool contains(const Vec& w, double tol = 0.0) const { return violation(w) <= tol; }
  /// Same set written as normal'w <= offset.
  Halfspace as_less_equal() const;
  std::string describe() const;
};

enum class Violation { kNone, kConsistencyLower, kConsistencyUpper, kEvaluability };

std::string to_string(Violation v);

struct Diagnostics {
  double w_mu = 0.0;
  double w_mu_b = 0.0;
  double w_mu_lb = 0.0;
  /// w'mu_b < 0: the consistency band's bounds swap order.
  bool negative_behavior_value = false;
};

struct OracleVerdict {
  bool accepted = true;
  Violation violated = Violation::kNone;
  std::optional<Halfspace> halfspace;
  Diagnostics diagnostics;
};

/// Lower side: reject if |1+eps| w'mu < w'mu_b, cut {w'(|1+eps| mu - mu_b) >= 0}.
/// Upper side: reject if |1-eps| w'mu > w'mu_b, cut {w'(|1-eps| mu - mu_b) <= 0}.
OracleVerdict consistency_check(const RewardWeights& w, const Vec& mu, const Vec& mu_b, double epsilon);

/// Reject if (1-Delta) w'mu < w'mu_lb, cut {w'((1-Delta) mu - mu_lb) >= 0}.
OracleVerdict evaluability_check(const RewardWeights& w, const Vec& mu, const Vec& mu_lb, double delta_cap);

/// Everything the oracle needs about the policy trained for one w.
struct PolicyEvaluation {
  Policy policy = Policy::uniform(1);
  ope::FeatureExpectationEstimate estimate;
  /// Whole-trajectory importance weights (empty for exact evaluations).
  Vec rho;
};

/// Evaluation of an exactly known mu: a zero-dispersion two-row estimate, so mu_lb = mu.
PolicyEvaluation exact_evaluation(Policy policy, const Vec& mu);

using SolverFn = std::function<PolicyEvaluation(const RewardWeights&)>;

/// Alg. 1 branch order on a precomputed estimate: consistency lower, then
/// upper, then evaluability; the first violation wins.
OracleVerdict judge(const RewardWeights& w, const ope::FeatureExpectationEstimate& estimate, const Vec& mu_b,
                    const Thresholds& thresholds);

OracleVerdict separation_oracle(const RewardWeights& w, const SolverFn& solver, const Vec& mu_b,
                                const Thresholds& thresholds);

/// Every constraint violated at w (not just the first), as halfspaces.
std::vector<std::pair<Violation, Halfspace>> violated_constraints(const RewardWeights& w, const Vec& mu,
                                                                  const Vec& mu_lb, const Vec& mu_b,
                                                                  const Thresholds& thresholds);

}  // namespace admissible::polytope
