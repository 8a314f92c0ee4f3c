#include "admissible/env/venticu.hpp"

#include <algorithm>
#include <cmath>

namespace admissible::env {

VentIcuFeatures::VentIcuFeatures(std::vector<VitalRange> ranges) : ranges_(std::move(ranges)) {
  if (ranges_.empty()) throw ConfigError("venticu features need at least one vital range");
  for (const auto& r : ranges_) {
    if (!(r.max >= r.min)) throw ConfigError("venticu vital range has max < min");
  }
}

Vec VentIcuFeatures::operator()(const Vec& state, int action) const {
  if (state.size() != state_dim()) throw ConfigError("venticu state has the wrong dimension");
  if (action != 0 && action != 1) throw ConfigError("venticu action must be 0 (off) or 1 (on)");
  const double on = action == 1 ? 1.0 : 0.0;
  const double off = 1.0 - on;
  std::size_t abnormal = 0;
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    const double v = state[static_cast<Eigen::Index>(i) + 2];
    if (v < ranges_[i].min || v > ranges_[i].max) ++abnormal;
  }
  Vec phi(3);
  phi[0] = -std::min(0.0, std::tanh(0.1 * (state[0] - 48.0))) * on;
  phi[1] = -(state[1] > 0.5 ? 1.0 : 0.0) * off;
  phi[2] = -static_cast<double>(abnormal) / static_cast<double>(ranges_.size()) * off;
  return phi;
}

}  // namespace admissible::env
