#pragma once

#include <vector>

#include "admissible/core/features.hpp"

namespace admissible::env {

/// Ventilator-weaning reward features over a synthetic state layout
/// [D, future_reintubation, v_1, ..., v_m]: hours into the current
/// ventilation episode, 1 if a later reintubation occurs in the admission,
/// then the monitored vitals/settings. Action 1 = on the ventilator.
///
///   phi_1 = -min(0, tanh(0.1 (D - 48))) * [a = 1]
///   phi_2 = -future_reintubation * [a = 0]
///   phi_3 = -(fraction of vitals outside [v_min, v_max]) * [a = 0]
struct VitalRange {
  double min = 0.0;
  double max = 0.0;
};

class VentIcuFeatures final : public FeatureMap {
 public:
  explicit VentIcuFeatures(std::vector<VitalRange> ranges);
  std::string name() const override { return "venticu"; }
  Eigen::Index dim() const override { return 3; }
  Eigen::Index state_dim() const override { return 2 + static_cast<Eigen::Index>(ranges_.size()); }
  Vec operator()(const Vec& state, int action) const override;
  bool uses_action() const override { return true; }

 private:
  std::vector<VitalRange> ranges_;
};

}  // namespace admissible::env
