#include "admissible/core/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace admissible {

namespace {

// Appends every integer vector of length k with sum |c_i| == budget.
void enumerate(int k, int budget, std::vector<int>& prefix, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(prefix.size()) == k - 1) {
    prefix.push_back(budget);
    out.push_back(prefix);
    if (budget != 0) {
      prefix.back() = -budget;
      out.push_back(prefix);
    }
    prefix.pop_back();
    return;
  }
  for (int c = -budget; c <= budget; ++c) {
    prefix.push_back(c);
    enumerate(k, budget - std::abs(c), prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<RewardWeights> l1_ball_grid(int k, double step) {
  if (k < 1) throw ConfigError("grid dimension must be positive");
  if (!(step > 0.0 && step <= 1.0)) throw ConfigError("grid step must lie in (0, 1]");
  const double inverse = 1.0 / step;
  const long n = std::lround(inverse);
  if (std::abs(inverse - static_cast<double>(n)) > 1e-9 * inverse) {
    throw ConfigError("grid step must divide 1 exactly (1/step must be an integer)");
  }
  std::vector<std::vector<int>> numerators;
  std::vector<int> prefix;
  enumerate(k, static_cast<int>(n), prefix, numerators);
  std::sort(numerators.begin(), numerators.end());
  numerators.erase(std::unique(numerators.begin(), numerators.end()), numerators.end());

  std::vector<RewardWeights> grid;
  grid.reserve(numerators.size());
  for (const auto& c : numerators) {
    Vec w(k);
    for (int i = 0; i < k; ++i) w[i] = static_cast<double>(c[i]) / static_cast<double>(n);
    grid.emplace_back(std::move(w), true);
  }
  return grid;
}

}  // namespace admissible
