#include "admissible/solver/extra_trees.hpp"

#include <algorithm>
#include <limits>

#include "admissible/env/collect.hpp"

namespace admissible::solver {

void ExtraTreesParams::validate() const {
  if (n_trees < 1) throw ConfigError("n_trees must be at least 1");
  if (min_leaf < 1) throw ConfigError("min_leaf must be at least 1");
  if (k_splits < 1) throw ConfigError("k_splits must be at least 1");
}

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = -std::numeric_limits<double>::infinity();
};

class TreeBuilder {
 public:
  TreeBuilder(const SampleMatrix& X, const Vec& y, const ExtraTreesParams& p, std::uint64_t seed)
      : X_(X), y_(y), p_(p), rng_(seed) {}

  Tree build() {
    std::vector<int> idx(static_cast<std::size_t>(X_.rows()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    struct Pending {
      int node;
      std::size_t begin, end;
    };
    Tree tree;
    new_node(tree);
    std::vector<Pending> stack{{0, 0, idx.size()}};
    while (!stack.empty()) {
      const Pending cur = stack.back();
      stack.pop_back();
      const Split split = choose(idx, cur.begin, cur.end);
      if (split.feature < 0) {
        tree.value[cur.node] = mean(idx, cur.begin, cur.end);
        continue;
      }
      auto mid = std::partition(idx.begin() + static_cast<std::ptrdiff_t>(cur.begin),
                                idx.begin() + static_cast<std::ptrdiff_t>(cur.end),
                                [&](int i) { return X_(i, split.feature) < split.threshold; });
      const auto m = static_cast<std::size_t>(mid - idx.begin());
      const int l = new_node(tree);
      const int r = new_node(tree);
      tree.feature[cur.node] = split.feature;
      tree.threshold[cur.node] = split.threshold;
      tree.left[cur.node] = l;
      tree.right[cur.node] = r;
      // Right pushed first so the left subtree is expanded (and draws) first.
      stack.push_back({r, m, cur.end});
      stack.push_back({l, cur.begin, m});
    }
    return tree;
  }

 private:
  static int new_node(Tree& t) {
    t.feature.push_back(-1);
    t.threshold.push_back(0.0);
    t.left.push_back(-1);
    t.right.push_back(-1);
    t.value.push_back(0.0);
    return static_cast<int>(t.feature.size()) - 1;
  }

  double mean(const std::vector<int>& idx, std::size_t b, std::size_t e) const {
    double s = 0.0;
    for (std::size_t k = b; k < e; ++k) s += y_[idx[k]];
    return s / static_cast<double>(e - b);
  }

  std::size_t count_left(const std::vector<int>& idx, std::size_t b, std::size_t e, int f, double thr) const {
    std::size_t n = 0;
    for (std::size_t k = b; k < e; ++k) n += X_(idx[k], f) < thr ? 1 : 0;
    return n;
  }

  double score(const std::vector<int>& idx, std::size_t b, std::size_t e, int f, double thr) const {
    // Variance reduction, up to terms constant across candidate splits.
    double sl = 0.0, sr = 0.0;
    std::size_t nl = 0, nr = 0;
    for (std::size_t k = b; k < e; ++k) {
      if (X_(idx[k], f) < thr) {
        sl += y_[idx[k]];
        ++nl;
      } else {
        sr += y_[idx[k]];
        ++nr;
      }
    }
    return sl * sl / static_cast<double>(nl) + sr * sr / static_cast<double>(nr);
  }

  Split choose(const std::vector<int>& idx, std::size_t b, std::size_t e) {
    const std::size_t n = e - b;
    const auto min_leaf = static_cast<std::size_t>(p_.min_leaf);
    if (n < 2 * min_leaf) return {};
    const Eigen::Index d = X_.cols();
    std::vector<double> lo(static_cast<std::size_t>(d), std::numeric_limits<double>::infinity());
    std::vector<double> hi(static_cast<std::size_t>(d), -std::numeric_limits<double>::infinity());
    for (std::size_t k = b; k < e; ++k) {
      const double* row = X_.row(idx[k]).data();
      for (Eigen::Index f = 0; f < d; ++f) {
        lo[f] = std::min(lo[f], row[f]);
        hi[f] = std::max(hi[f], row[f]);
      }
    }
    std::vector<int> candidates;
    for (Eigen::Index f = 0; f < d; ++f) {
      if (hi[f] > lo[f]) candidates.push_back(static_cast<int>(f));
    }
    if (candidates.empty()) return {};

    Split best;
    int found = 0;
    constexpr int kAttempts = 8;
    for (int attempt = 0; attempt < kAttempts * p_.k_splits && found < p_.k_splits; ++attempt) {
      const int f = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng_)];
      const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
      double thr = lo[f] + u * (hi[f] - lo[f]);
      if (thr <= lo[f]) thr = std::nextafter(lo[f], hi[f]);
      const std::size_t nl = count_left(idx, b, e, f, thr);
      if (nl < min_leaf || n - nl < min_leaf) continue;
      ++found;
      if (p_.k_splits == 1) return {f, thr, 0.0};
      const double s = score(idx, b, e, f, thr);
      if (s > best.score) best = {f, thr, s};
    }
    return best;
  }

  const SampleMatrix& X_;
  const Vec& y_;
  const ExtraTreesParams& p_;
  Rng rng_;
};

}  // namespace

ExtraTrees ExtraTrees::fit(const SampleMatrix& X, const Vec& y, const ExtraTreesParams& params, int jobs) {
  params.validate();
  if (X.rows() == 0) throw ConfigError("cannot fit trees on an empty sample");
  if (X.rows() != y.size()) throw ConfigError("sample and target counts differ");
  if (X.rows() < params.min_leaf) {
    throw ConfigError("too few samples (" + std::to_string(X.rows()) + ") for min_leaf " +
                      std::to_string(params.min_leaf));
  }
  if (!y.allFinite()) throw NumericalError("non-finite regression targets");
  ExtraTrees model;
  model.input_dim_ = X.cols();
  model.trees_.resize(static_cast<std::size_t>(params.n_trees));
  env::parallel_for(model.trees_.size(), jobs, [&](std::size_t t) {
    model.trees_[t] = TreeBuilder(X, y, params, derive_seed(params.seed, t)).build();
  });
  return model;
}

double ExtraTrees::predict(const double* x) const {
  double s = 0.0;
  for (const auto& t : trees_) s += t.value[t.leaf_of(x)];
  return s / static_cast<double>(trees_.size());
}

Vec ExtraTrees::predict(const SampleMatrix& X) const {
  if (X.cols() != input_dim_) throw ConfigError("prediction input has the wrong dimension");
  Vec out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = predict(X.row(i).data());
  return out;
}

std::vector<std::vector<int>> ExtraTrees::leaf_indices(const SampleMatrix& X) const {
  if (X.cols() != input_dim_) throw ConfigError("input has the wrong dimension");
  std::vector<std::vector<int>> out(trees_.size(), std::vector<int>(static_cast<std::size_t>(X.rows())));
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) out[t][static_cast<std::size_t>(i)] = trees_[t].leaf_of(X.row(i).data());
  }
  return out;
}

void ExtraTrees::refit_leaves(const std::vector<std::vector<int>>& leaves, const Vec& y) {
  if (leaves.size() != trees_.size()) throw ConfigError("leaf table does not match the ensemble");
  std::vector<double> sum;
  std::vector<int> count;
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    Tree& tree = trees_[t];
    sum.assign(tree.n_nodes(), 0.0);
    count.assign(tree.n_nodes(), 0);
    const auto& leaf = leaves[t];
    for (std::size_t i = 0; i < leaf.size(); ++i) {
      sum[static_cast<std::size_t>(leaf[i])] += y[static_cast<Eigen::Index>(i)];
      ++count[static_cast<std::size_t>(leaf[i])];
    }
    for (std::size_t n = 0; n < tree.n_nodes(); ++n) {
      if (count[n] > 0) tree.value[n] = sum[n] / count[n];
    }
  }
}

nlohmann::json ExtraTrees::to_json() const {
  nlohmann::json j;
  j["input_dim"] = input_dim_;
  j["trees"] = nlohmann::json::array();
  for (const auto& t : trees_) {
    j["trees"].push_back({{"feature", t.feature},
                          {"threshold", t.threshold},
                          {"left", t.left},
                          {"right", t.right},
                          {"value", t.value}});
  }
  return j;
}

ExtraTrees ExtraTrees::from_json(const nlohmann::json& j) {
  ExtraTrees model;
  model.input_dim_ = j.at("input_dim").get<Eigen::Index>();
  for (const auto& jt : j.at("trees")) {
    Tree t;
    t.feature = jt.at("feature").get<std::vector<int>>();
    t.threshold = jt.at("threshold").get<std::vector<double>>();
    t.left = jt.at("left").get<std::vector<int>>();
    t.right = jt.at("right").get<std::vector<int>>();
    t.value = jt.at("value").get<std::vector<double>>();
    const std::size_t n = t.feature.size();
    if (n == 0 || t.threshold.size() != n || t.left.size() != n || t.right.size() != n || t.value.size() != n) {
      throw ConfigError("malformed tree in serialized ensemble");
    }
    model.trees_.push_back(std::move(t));
  }
  if (model.trees_.empty()) throw ConfigError("serialized ensemble has no trees");
  return model;
}

}  // namespace admissible::solver
