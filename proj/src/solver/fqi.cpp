#include "admissible/solver/fqi.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "admissible/env/collect.hpp"

namespace admissible::solver {

namespace {

/// Tree ensemble sharing split structure with others; only leaf values are owned.
class SharedTreeRegressor final : public Regressor {
 public:
  SharedTreeRegressor(std::shared_ptr<const ExtraTrees> structure, std::vector<std::vector<double>> values)
      : structure_(std::move(structure)), values_(std::move(values)) {}

  double predict(const double* x) const override {
    const auto& trees = structure_->trees();
    double s = 0.0;
    for (std::size_t t = 0; t < trees.size(); ++t) s += values_[t][static_cast<std::size_t>(trees[t].leaf_of(x))];
    return s / static_cast<double>(trees.size());
  }
  Eigen::Index input_dim() const override { return structure_->input_dim(); }
  nlohmann::json to_json() const override {
    ExtraTrees copy = *structure_;
    for (std::size_t t = 0; t < values_.size(); ++t) copy.mutable_trees()[t].value = values_[t];
    return TreeRegressor(std::move(copy)).to_json();
  }

 private:
  std::shared_ptr<const ExtraTrees> structure_;
  std::vector<std::vector<double>> values_;
};

}  // namespace

QFunction::QFunction(std::vector<RegressorPtr> per_action) : regressors_(std::move(per_action)) {
  if (regressors_.empty()) throw ConfigError("a Q-function needs at least one action");
  for (const auto& r : regressors_) {
    if (!r || r->input_dim() != regressors_.front()->input_dim()) {
      throw ConfigError("per-action regressors must share one input dimension");
    }
  }
}

Vec QFunction::values(const Vec& x) const {
  if (x.size() != regressors_.front()->input_dim()) throw ConfigError("Q-function input has the wrong dimension");
  Vec q(n_actions());
  for (int a = 0; a < n_actions(); ++a) q[a] = regressors_[static_cast<std::size_t>(a)]->predict(x.data());
  return q;
}

nlohmann::json QFunction::to_json() const {
  nlohmann::json j;
  j["format"] = "admissible-qfunction";
  j["version"] = 1;
  j["actions"] = nlohmann::json::array();
  for (const auto& r : regressors_) j["actions"].push_back(r->to_json());
  return j;
}

QFunction QFunction::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format") != "admissible-qfunction" || j.at("version") != 1) {
      throw ConfigError("unsupported Q-function format");
    }
    std::vector<RegressorPtr> regs;
    for (const auto& r : j.at("actions")) regs.push_back(regressor_from_json(r));
    return QFunction(std::move(regs));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed Q-function: ") + e.what());
  }
}

void QFunction::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << to_json().dump() << "\n";
}

QFunction QFunction::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed Q-function file: ") + e.what());
  }
}

Policy greedy_policy(QFunctionPtr q) { return Policy::greedy(std::move(q)); }

void FqiParams::validate() const {
  if (iterations < 1) throw ConfigError("FQI needs at least one iteration");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("FQI discount must lie in [0, 1]");
  regressor.validate();
}

struct FqiProblem::Impl {
  int n_actions = 0;
  SampleMatrix x;                          // encoded s_i
  SampleMatrix x_next;                     // encoded s'_i
  std::vector<int> action;
  std::vector<char> terminal;
  Mat features;                            // phi(s_i, a_i)
  std::vector<std::vector<int>> by_action; // transition ids per action
  std::vector<SampleMatrix> x_by_action;
  std::vector<char> supported;             // enough logged samples to fit
  Eigen::Index input_dim = 0;

  // Frozen-structure path.
  bool frozen = false;
  std::vector<std::shared_ptr<const ExtraTrees>> structure;       // per action
  std::vector<std::vector<std::vector<int>>> train_leaves;        // [a][tree][j]
  std::vector<std::vector<std::vector<int>>> next_leaves;         // [a][tree][i]
};

FqiProblem::FqiProblem(const BatchDataset& data, FeatureMapPtr phi, int n_actions, FqiParams params, Encoder encode)
    : impl_(std::make_unique<Impl>()), params_(std::move(params)) {
  params_.validate();
  if (!phi) throw ConfigError("FQI needs a feature map");
  if (n_actions < 1) throw ConfigError("FQI needs at least one action");
  if (phi->state_dim() != data.state_dim()) throw ConfigError("feature map does not match the dataset state dimension");
  Impl& m = *impl_;
  m.n_actions = n_actions;
  if (!encode) encode = [](const Vec& s) { return s; };

  const std::size_t n = data.total_steps();
  const Eigen::Index d = encode(data[0].states()[0]).size();
  m.x.resize(static_cast<Eigen::Index>(n), d);
  m.x_next.resize(static_cast<Eigen::Index>(n), d);
  m.features.resize(static_cast<Eigen::Index>(n), phi->dim());
  m.action.reserve(n);
  m.terminal.reserve(n);
  m.by_action.assign(static_cast<std::size_t>(n_actions), {});
  Eigen::Index i = 0;
  for (const auto& tr : data) {
    for (std::size_t t = 0; t < tr.length(); ++t, ++i) {
      const int a = tr.actions()[t];
      if (a >= n_actions) throw ConfigError("logged action " + std::to_string(a) + " is out of range");
      m.x.row(i) = encode(tr.states()[t]).transpose();
      m.x_next.row(i) = encode(tr.next_state(t)).transpose();
      m.features.row(i) = (*phi)(tr.states()[t], a).transpose();
      m.action.push_back(a);
      m.terminal.push_back(tr.terminal() && t + 1 == tr.length() ? 1 : 0);
      m.by_action[static_cast<std::size_t>(a)].push_back(static_cast<int>(i));
    }
  }
  const auto& rp = params_.regressor;
  const int min_samples = rp.kind == "extra_trees" ? rp.trees.min_leaf : 1;
  m.x_by_action.resize(static_cast<std::size_t>(n_actions));
  m.supported.assign(static_cast<std::size_t>(n_actions), 0);
  m.input_dim = d;
  for (int a = 0; a < n_actions; ++a) {
    const auto& ids = m.by_action[static_cast<std::size_t>(a)];
    // Actions the batch barely covers cannot be fitted; they get -inf values.
    if (static_cast<int>(ids.size()) < std::max(min_samples, 1)) continue;
    m.supported[static_cast<std::size_t>(a)] = 1;
    SampleMatrix xa(static_cast<Eigen::Index>(ids.size()), d);
    for (std::size_t j = 0; j < ids.size(); ++j) xa.row(static_cast<Eigen::Index>(j)) = m.x.row(ids[j]);
    m.x_by_action[static_cast<std::size_t>(a)] = std::move(xa);
  }

  if (std::none_of(m.supported.begin(), m.supported.end(), [](char c) { return c != 0; })) {
    throw ConfigError("no action has the " + std::to_string(min_samples) + " logged samples needed to fit");
  }

  m.frozen = rp.kind == "extra_trees" && rp.trees.k_splits == 1;
  if (m.frozen) {
    m.structure.resize(static_cast<std::size_t>(n_actions));
    m.train_leaves.resize(static_cast<std::size_t>(n_actions));
    m.next_leaves.resize(static_cast<std::size_t>(n_actions));
    for (int a = 0; a < n_actions; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      if (!m.supported[ua]) continue;
      ExtraTreesParams tp = rp.trees;
      tp.seed = derive_seed(rp.trees.seed, ua);
      const Vec zeros = Vec::Zero(m.x_by_action[ua].rows());
      auto model = std::make_shared<ExtraTrees>(ExtraTrees::fit(m.x_by_action[ua], zeros, tp, params_.jobs));
      m.train_leaves[ua] = model->leaf_indices(m.x_by_action[ua]);
      m.next_leaves[ua] = model->leaf_indices(m.x_next);
      m.structure[ua] = std::move(model);
    }
  }
}

FqiProblem::~FqiProblem() = default;

std::size_t FqiProblem::n_transitions() const { return impl_->action.size(); }
const Mat& FqiProblem::transition_features() const { return impl_->features; }
bool FqiProblem::uses_frozen_structure() const { return impl_->frozen; }

QFunctionPtr FqiProblem::solve(const RewardWeights& w) const {
  if (w.dim() != impl_->features.cols()) throw ConfigError("reward weights do not match the feature dimension");
  return solve_rewards(impl_->features * w.values());
}

QFunctionPtr FqiProblem::solve_rewards(const Vec& rewards) const {
  const Impl& m = *impl_;
  const auto n = static_cast<Eigen::Index>(m.action.size());
  if (rewards.size() != n) throw ConfigError("one reward per transition is required");
  if (!rewards.allFinite()) throw NumericalError("non-finite rewards");
  const auto n_act = static_cast<std::size_t>(m.n_actions);
  const double gamma = params_.gamma;

  Vec max_next = Vec::Zero(n);
  Vec target(n);
  auto make_targets = [&] {
    for (Eigen::Index i = 0; i < n; ++i) target[i] = rewards[i] + (m.terminal[static_cast<std::size_t>(i)] ? 0.0 : gamma * max_next[i]);
  };
  auto gather = [&](std::size_t a) {
    const auto& ids = m.by_action[a];
    Vec ya(static_cast<Eigen::Index>(ids.size()));
    for (std::size_t j = 0; j < ids.size(); ++j) ya[static_cast<Eigen::Index>(j)] = target[ids[j]];
    return ya;
  };

  if (m.frozen) {
    std::vector<std::vector<std::vector<double>>> values(n_act);
    for (std::size_t a = 0; a < n_act; ++a) {
      if (!m.supported[a]) continue;
      values[a].resize(m.structure[a]->trees().size());
      for (std::size_t t = 0; t < values[a].size(); ++t) values[a][t] = m.structure[a]->trees()[t].value;
    }
    std::vector<double> sum;
    std::vector<int> count;
    Vec q_next(n);
    for (int it = 0; it < params_.iterations; ++it) {
      make_targets();
      for (std::size_t a = 0; a < n_act; ++a) {
        if (!m.supported[a]) continue;
        const Vec ya = gather(a);
        for (std::size_t t = 0; t < values[a].size(); ++t) {
          auto& val = values[a][t];
          sum.assign(val.size(), 0.0);
          count.assign(val.size(), 0);
          const auto& leaf = m.train_leaves[a][t];
          for (std::size_t j = 0; j < leaf.size(); ++j) {
            sum[static_cast<std::size_t>(leaf[j])] += ya[static_cast<Eigen::Index>(j)];
            ++count[static_cast<std::size_t>(leaf[j])];
          }
          for (std::size_t k = 0; k < val.size(); ++k) {
            if (count[k] > 0) val[k] = sum[k] / count[k];
          }
        }
      }
      if (it + 1 == params_.iterations) break;
      bool first = true;
      for (std::size_t a = 0; a < n_act; ++a) {
        if (!m.supported[a]) continue;
        q_next.setZero();
        for (std::size_t t = 0; t < values[a].size(); ++t) {
          const auto& val = values[a][t];
          const auto& leaf = m.next_leaves[a][t];
          for (Eigen::Index i = 0; i < n; ++i) q_next[i] += val[static_cast<std::size_t>(leaf[static_cast<std::size_t>(i)])];
        }
        q_next /= static_cast<double>(values[a].size());
        if (first) {
          first = false;
          max_next = q_next;
        } else {
          max_next = max_next.cwiseMax(q_next);
        }
      }
    }
    std::vector<RegressorPtr> regs;
    for (std::size_t a = 0; a < n_act; ++a) {
      if (m.supported[a]) {
        regs.push_back(std::make_shared<SharedTreeRegressor>(m.structure[a], std::move(values[a])));
      } else {
        regs.push_back(std::make_shared<UnsupportedActionRegressor>(m.input_dim));
      }
    }
    return std::make_shared<QFunction>(std::move(regs));
  }

  std::vector<RegressorPtr> regs(n_act);
  for (int it = 0; it < params_.iterations; ++it) {
    make_targets();
    for (std::size_t a = 0; a < n_act; ++a) {
      if (!m.supported[a]) {
        regs[a] = std::make_shared<UnsupportedActionRegressor>(m.input_dim);
        continue;
      }
      RegressorParams rp = params_.regressor;
      rp.trees.seed = derive_seed(params_.regressor.trees.seed, static_cast<std::uint64_t>(it) * n_act + a);
      regs[a] = fit_regressor(m.x_by_action[a], gather(a), rp, params_.jobs);
    }
    if (it + 1 == params_.iterations) break;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double* xi = m.x_next.row(i).data();
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < n_act; ++a) {
        if (m.supported[a]) best = std::max(best, regs[a]->predict(xi));
      }
      max_next[i] = best;
    }
  }
  return std::make_shared<QFunction>(std::move(regs));
}

QFunctionPtr fitted_q_iteration(const BatchDataset& data, FeatureMapPtr phi, const RewardWeights& w, int n_actions,
                                double gamma, int iterations, const RegressorParams& regressor, Encoder encode) {
  FqiParams params;
  params.gamma = gamma;
  params.iterations = iterations;
  params.regressor = regressor;
  return FqiProblem(data, std::move(phi), n_actions, params, std::move(encode)).solve(w);
}

}  // namespace admissible::solver
