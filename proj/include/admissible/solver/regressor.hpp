#pragma once

#include <limits>
#include <memory>
#include <string>

#include "admissible/solver/extra_trees.hpp"

namespace admissible::solver {

struct RegressorParams {
  /// "extra_trees" or "linear".
  std::string kind = "extra_trees";
  ExtraTreesParams trees;
  /// Ridge penalty of the linear regressor (intercept not penalized).
  double ridge = 1e-6;

  void validate() const;
};

class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual double predict(const double* x) const = 0;
  virtual Eigen::Index input_dim() const = 0;
  virtual nlohmann::json to_json() const = 0;

  double predict(const Vec& x) const { return predict(x.data()); }
};

using RegressorPtr = std::shared_ptr<const Regressor>;

class TreeRegressor final : public Regressor {
 public:
  explicit TreeRegressor(ExtraTrees model) : model_(std::move(model)) {}
  double predict(const double* x) const override { return model_.predict(x); }
  Eigen::Index input_dim() const override { return model_.input_dim(); }
  nlohmann::json to_json() const override;
  const ExtraTrees& model() const { return model_; }

 private:
  ExtraTrees model_;
};

/// y = b + c'x by ridge-regularized least squares.
class LinearRegressor final : public Regressor {
 public:
  LinearRegressor(double intercept, Vec coef) : intercept_(intercept), coef_(std::move(coef)) {}
  static LinearRegressor fit(const SampleMatrix& X, const Vec& y, double ridge);
  double predict(const double* x) const override;
  Eigen::Index input_dim() const override { return coef_.size(); }
  nlohmann::json to_json() const override;
  double intercept() const { return intercept_; }
  const Vec& coef() const { return coef_; }

 private:
  double intercept_;
  Vec coef_;
};

/// Stand-in for an action with too few logged samples to fit: predicts -inf,
/// so derived policies never choose it and it never wins a bootstrap max.
class UnsupportedActionRegressor final : public Regressor {
 public:
  explicit UnsupportedActionRegressor(Eigen::Index input_dim) : input_dim_(input_dim) {}
  double predict(const double*) const override { return -std::numeric_limits<double>::infinity(); }
  Eigen::Index input_dim() const override { return input_dim_; }
  nlohmann::json to_json() const override { return {{"kind", "unsupported"}, {"input_dim", input_dim_}}; }

 private:
  Eigen::Index input_dim_;
};

RegressorPtr fit_regressor(const SampleMatrix& X, const Vec& y, const RegressorParams& params, int jobs = 1);
RegressorPtr regressor_from_json(const nlohmann::json& j);

}  // namespace admissible::solver
