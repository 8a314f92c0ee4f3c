#pragma once

#include <vector>

#include "admissible/polytope/oracle.hpp"

namespace admissible::fpl {

struct ProjectionOptions {
  /// Certificate: every constraint violated by less than this, and the
  /// iterate and the correction terms moving by less than this over a full cycle.
  double tolerance = 1e-8;
  int max_cycles = 200000;
};

struct ProjectionResult {
  Vec point;
  int cycles = 0;
  double max_violation = 0.0;
  /// True when Dykstra ran out of cycles and the exact active-set solve
  /// produced the point instead.
  bool exact_fallback = false;
};

/// Euclidean projection onto the l1 ball of radius `radius` (Duchi et al.).
Vec project_l1_ball(const Vec& v, double radius);

/// Nearest point to w_init inside every halfspace and the l1 ball of radius
/// norm_cap (norm_cap <= 0 drops the ball), by Dykstra's cyclic projection.
/// Nearly parallel halfspaces can stall Dykstra; if the cycle budget runs out
/// the point is recomputed by an exact dual active-set solve. Either way the
/// result must pass the violation certificate, otherwise InfeasibleError
/// names the offending halfspaces.
ProjectionResult nearest_admissible_point(const Vec& w_init, const std::vector<polytope::Halfspace>& halfspaces,
                                          double norm_cap = 1.0, const ProjectionOptions& options = {});

}  // namespace admissible::fpl
