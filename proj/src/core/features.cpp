#include "admissible/core/features.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace admissible {

StackedFeatures::StackedFeatures(std::vector<FeatureMapPtr> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw ConfigError("stacked feature map needs at least one part");
  for (const auto& p : parts_) {
    if (p->state_dim() != parts_.front()->state_dim()) {
      throw ConfigError("stacked feature maps disagree on state dimension");
    }
    dim_ += p->dim();
  }
}

std::string StackedFeatures::name() const {
  std::string out = "stack(";
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (i) out += ",";
    out += parts_[i]->name();
  }
  return out + ")";
}

Vec StackedFeatures::operator()(const Vec& state, int action) const {
  Vec out(dim_);
  Eigen::Index offset = 0;
  for (const auto& p : parts_) {
    out.segment(offset, p->dim()) = (*p)(state, action);
    offset += p->dim();
  }
  return out;
}

bool StackedFeatures::uses_action() const {
  return std::any_of(parts_.begin(), parts_.end(), [](const auto& p) { return p->uses_action(); });
}

EmpiricalCdf::EmpiricalCdf(std::span<const double> sample) {
  if (sample.empty()) throw ConfigError("cannot fit an empirical CDF to an empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  for (double x : sorted) {
    if (!std::isfinite(x)) throw ConfigError("empirical CDF sample contains non-finite values");
  }
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  if (n == 1) {
    knots_ = {sorted[0]};
    levels_ = {0.5};
    return;
  }
  const double denom = static_cast<double>(n - 1);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
    // tied block occupies ranks i..j; its mid-rank is their average
    knots_.push_back(sorted[i]);
    levels_.push_back(0.5 * static_cast<double>(i + j) / denom);
    i = j + 1;
  }
}

EmpiricalCdf EmpiricalCdf::from_knots(std::vector<double> knots, std::vector<double> levels) {
  if (knots.empty() || knots.size() != levels.size()) throw ConfigError("malformed empirical CDF knots");
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (!(knots[i] > knots[i - 1]) || levels[i] < levels[i - 1]) {
      throw ConfigError("empirical CDF knots must be strictly increasing");
    }
  }
  EmpiricalCdf cdf;
  cdf.knots_ = std::move(knots);
  cdf.levels_ = std::move(levels);
  return cdf;
}

double EmpiricalCdf::operator()(double x) const {
  if (knots_.empty()) throw ConfigError("empirical CDF used before fitting");
  if (knots_.size() == 1) return x < knots_[0] ? 0.0 : (x > knots_[0] ? 1.0 : levels_[0]);
  if (x <= knots_.front()) return x < knots_.front() ? 0.0 : levels_.front();
  if (x >= knots_.back()) return x > knots_.back() ? 1.0 : levels_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const auto hi = static_cast<std::size_t>(it - knots_.begin());
  const auto lo = hi - 1;
  const double frac = (x - knots_[lo]) / (knots_[hi] - knots_[lo]);
  return levels_[lo] + frac * (levels_[hi] - levels_[lo]);
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    std::ostringstream msg;
    msg << "discount must lie in (0, 1], got " << gamma;
    throw ConfigError(msg.str());
  }
}

Vec discounted_feature_sum(const Trajectory& trajectory, const FeatureMap& phi, double gamma) {
  check_gamma(gamma);
  if (trajectory.state_dim() != phi.state_dim()) {
    std::ostringstream msg;
    msg << "feature map '" << phi.name() << "' expects states of dimension " << phi.state_dim()
        << " but trajectory states have dimension " << trajectory.state_dim();
    throw ConfigError(msg.str());
  }
  Vec sum = Vec::Zero(phi.dim());
  double discount = 1.0;
  for (std::size_t t = 0; t < trajectory.length(); ++t) {
    sum += discount * phi(trajectory.states()[t], trajectory.actions()[t]);
    discount *= gamma;
  }
  return sum;
}

Vec behavior_feature_expectations(const BatchDataset& data, const FeatureMap& phi, double gamma) {
  Vec total = Vec::Zero(phi.dim());
  for (const auto& tr : data) total += discounted_feature_sum(tr, phi, gamma);
  return total / static_cast<double>(data.size());
}

}  // namespace admissible
