#pragma once

#include <vector>

#include "admissible/core/types.hpp"

namespace admissible {

/// All weight vectors on the unit l1 sphere in R^k whose components are
/// integer multiples of `step`, sorted lexicographically (ascending).
/// Enumeration is done on integer numerators, so every vector has
/// sum |numerator| == 1/step exactly before the single division.
/// Throws ConfigError unless 1/step is an integer.
std::vector<RewardWeights> l1_ball_grid(int k, double step);

}  // namespace admissible
