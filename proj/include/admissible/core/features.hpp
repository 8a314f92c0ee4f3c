#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "admissible/core/types.hpp"

namespace admissible {

/// Vector feature function phi(s, a) in R^k. State-only maps ignore the action.
class FeatureMap {
 public:
  virtual ~FeatureMap() = default;

  virtual std::string name() const = 0;
  /// Output dimension k.
  virtual Eigen::Index dim() const = 0;
  /// Required input state dimension.
  virtual Eigen::Index state_dim() const = 0;
  virtual Vec operator()(const Vec& state, int action) const = 0;
  virtual bool uses_action() const { return false; }
};

using FeatureMapPtr = std::shared_ptr<const FeatureMap>;

/// phi(s) = s.
class IdentityFeatures final : public FeatureMap {
 public:
  explicit IdentityFeatures(Eigen::Index state_dim) : dim_(state_dim) {}
  std::string name() const override { return "identity"; }
  Eigen::Index dim() const override { return dim_; }
  Eigen::Index state_dim() const override { return dim_; }
  Vec operator()(const Vec& state, int) const override { return state; }

 private:
  Eigen::Index dim_;
};

/// Concatenation of several maps over the same state space.
class StackedFeatures final : public FeatureMap {
 public:
  explicit StackedFeatures(std::vector<FeatureMapPtr> parts);
  std::string name() const override;
  Eigen::Index dim() const override { return dim_; }
  Eigen::Index state_dim() const override { return parts_.front()->state_dim(); }
  Vec operator()(const Vec& state, int action) const override;
  bool uses_action() const override;

 private:
  std::vector<FeatureMapPtr> parts_;
  Eigen::Index dim_ = 0;
};

/// Empirical CDF of a sample with linear interpolation between order
/// statistics. Distinct sorted values v_0 < ... < v_m carry their mid-rank
/// (0-based, divided by n-1), so the sample maps onto [0, 1] with mean exactly
/// 1/2, a unique maximum maps to 1 and the median of an odd-sized sample to 1/2.
class EmpiricalCdf {
 public:
  EmpiricalCdf() = default;
  explicit EmpiricalCdf(std::span<const double> sample);

  bool fitted() const { return !knots_.empty(); }
  double operator()(double x) const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& levels() const { return levels_; }
  static EmpiricalCdf from_knots(std::vector<double> knots, std::vector<double> levels);

 private:
  std::vector<double> knots_;
  std::vector<double> levels_;
};

/// Sum_t gamma^t phi(s_t, a_t) over the logged steps of one trajectory.
Vec discounted_feature_sum(const Trajectory& trajectory, const FeatureMap& phi, double gamma);

/// Arithmetic mean of discounted_feature_sum over all trajectories (mu_b).
Vec behavior_feature_expectations(const BatchDataset& data, const FeatureMap& phi, double gamma);

void check_gamma(double gamma);

}  // namespace admissible
