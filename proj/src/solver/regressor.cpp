#include "admissible/solver/regressor.hpp"

namespace admissible::solver {

void RegressorParams::validate() const {
  if (kind == "extra_trees") {
    trees.validate();
  } else if (kind == "linear") {
    if (!(ridge >= 0.0)) throw ConfigError("ridge penalty must be non-negative");
  } else {
    throw ConfigError("unknown regressor kind '" + kind + "' (expected extra_trees or linear)");
  }
}

nlohmann::json TreeRegressor::to_json() const {
  nlohmann::json j = model_.to_json();
  j["kind"] = "extra_trees";
  return j;
}

LinearRegressor LinearRegressor::fit(const SampleMatrix& X, const Vec& y, double ridge) {
  if (X.rows() == 0) throw ConfigError("cannot fit a linear model on an empty sample");
  const Eigen::Index d = X.cols();
  Mat A(X.rows(), d + 1);
  A.col(0).setOnes();
  A.rightCols(d) = X;
  Mat gram = A.transpose() * A;
  for (Eigen::Index i = 1; i <= d; ++i) gram(i, i) += ridge;
  const Vec beta = gram.ldlt().solve(A.transpose() * y);
  if (!beta.allFinite()) throw NumericalError("linear regression produced non-finite coefficients");
  return {beta[0], beta.tail(d)};
}

double LinearRegressor::predict(const double* x) const {
  return intercept_ + Eigen::Map<const Vec>(x, coef_.size()).dot(coef_);
}

nlohmann::json LinearRegressor::to_json() const {
  return {{"kind", "linear"}, {"intercept", intercept_}, {"coef", std::vector<double>(coef_.begin(), coef_.end())}};
}

RegressorPtr fit_regressor(const SampleMatrix& X, const Vec& y, const RegressorParams& params, int jobs) {
  params.validate();
  if (params.kind == "linear") return std::make_shared<LinearRegressor>(LinearRegressor::fit(X, y, params.ridge));
  return std::make_shared<TreeRegressor>(ExtraTrees::fit(X, y, params.trees, jobs));
}

RegressorPtr regressor_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "extra_trees") return std::make_shared<TreeRegressor>(ExtraTrees::from_json(j));
  if (kind == "linear") {
    const auto coef = j.at("coef").get<std::vector<double>>();
    return std::make_shared<LinearRegressor>(j.at("intercept").get<double>(),
                                             Eigen::Map<const Vec>(coef.data(), static_cast<Eigen::Index>(coef.size())));
  }
  if (kind == "unsupported") return std::make_shared<UnsupportedActionRegressor>(j.at("input_dim").get<Eigen::Index>());
  throw ConfigError("unknown regressor kind '" + kind + "'");
}

}  // namespace admissible::solver
