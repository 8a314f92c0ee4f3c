#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "admissible/fpl/projection.hpp"
#include "admissible/polytope/oracle.hpp"

namespace admissible::fpl {

struct FplConfig {
  int iterations = 20;
  /// "literal": perturbations U[0, k sqrt(T)]; "damped": U[0, 1/(k sqrt(T))].
  std::string perturbation = "literal";
  /// Explicit perturbation scale; 0 selects the preset above.
  double scale = 0.0;
  std::uint64_t seed = 0;
  polytope::Thresholds thresholds;
  ProjectionOptions projection;
  double norm_cap = 1.0;

  void validate() const;
  double perturbation_scale(Eigen::Index k) const;
};

struct FplIteration {
  int t = 0;
  Vec leader;           // sum_{i<t} w_i + t p_t, before normalization
  Vec solver_weights;   // leader scaled to unit l1 norm (what the solver saw)
  Vec p;
  Vec q;
  Vec mu;               // mu-hat(pi_t)
  Vec mu_perturbed;     // mu-hat(pi_t) + q_t
  std::string policy_id;
  std::vector<std::string> new_constraints;
  std::size_t n_halfspaces = 0;
  Vec w;                // projected w_t
  int projection_cycles = 0;
};

struct FplResult {
  RewardWeights w_bar;
  Policy pi_final = Policy::uniform(1);
  std::vector<FplIteration> trace;
  std::vector<polytope::Halfspace> halfspaces;
};

/// Follow-perturbed-leader search for the admissible weights nearest w_init.
/// Each iteration trains pi_t on the perturbed running leader, checks all
/// admissibility constraints at the current point with the perturbed mu_t,
/// accumulates the violated ones as halfspaces and re-projects w_init.
FplResult fpl_run(const RewardWeights& w_init, const FplConfig& cfg, const polytope::SolverFn& solver,
                  const Vec& mu_b);

/// One JSON object per iteration.
void write_trace_jsonl(std::ostream& out, const std::vector<FplIteration>& trace);

}  // namespace admissible::fpl
