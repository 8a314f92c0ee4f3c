#include "admissible/solver/tabular.hpp"

#include <algorithm>
#include <cmath>

namespace admissible::solver {

namespace {

constexpr double kStochasticTol = 1e-9;

void check_distribution(const Vec& p, const std::string& what) {
  if ((p.array() < -kStochasticTol).any() || std::abs(p.sum() - 1.0) > kStochasticTol) {
    throw ConfigError(what + " is not a probability distribution");
  }
}

}  // namespace

void TabularMDP::validate() const {
  const auto s = initial.size();
  if (s == 0) throw ConfigError("tabular MDP has no states");
  if (transitions.empty()) throw ConfigError("tabular MDP has no actions");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("tabular discount must lie in [0, 1)");
  if (features.rows() != s) throw ConfigError("feature matrix needs one row per state");
  check_distribution(initial, "initial distribution");
  for (std::size_t a = 0; a < transitions.size(); ++a) {
    const Mat& p = transitions[a];
    if (p.rows() != s || p.cols() != s) throw ConfigError("transition matrix has the wrong shape");
    for (Eigen::Index i = 0; i < s; ++i) {
      check_distribution(p.row(i).transpose(), "P(.|s=" + std::to_string(i) + ",a=" + std::to_string(a) + ")");
    }
  }
}

Vec discounted_occupancy(const TabularMDP& mdp, const Mat& policy) {
  const int s = mdp.n_states();
  if (policy.rows() != s || policy.cols() != mdp.n_actions()) throw ConfigError("policy table has the wrong shape");
  Mat p_pi = Mat::Zero(s, s);
  for (int a = 0; a < mdp.n_actions(); ++a) p_pi += policy.col(a).asDiagonal() * mdp.transitions[static_cast<std::size_t>(a)];
  const Mat system = Mat::Identity(s, s) - mdp.gamma * p_pi.transpose();
  const Vec d = system.partialPivLu().solve(mdp.initial);
  if (!d.allFinite()) throw NumericalError("occupancy linear system is singular");
  return d;
}

Vec policy_feature_expectations(const TabularMDP& mdp, const Mat& policy) {
  return mdp.features.transpose() * discounted_occupancy(mdp, policy);
}

Mat deterministic_table(const std::vector<int>& actions, int n_actions) {
  Mat table = Mat::Zero(static_cast<Eigen::Index>(actions.size()), n_actions);
  for (std::size_t s = 0; s < actions.size(); ++s) table(static_cast<Eigen::Index>(s), actions[s]) = 1.0;
  return table;
}

Mat policy_table(const Policy& policy, int n_states) {
  Mat table(n_states, policy.n_actions());
  Vec s(1);
  for (int i = 0; i < n_states; ++i) {
    s[0] = i;
    table.row(i) = policy.action_probs(s).transpose();
  }
  return table;
}

TabularSolution tabular_solve(const TabularMDP& mdp, const RewardWeights& w) {
  mdp.validate();
  if (w.dim() != mdp.feature_dim()) throw ConfigError("reward weights do not match the feature dimension");
  const int s = mdp.n_states();
  const int na = mdp.n_actions();
  const Vec r = mdp.features * w.values();
  Vec v = Vec::Zero(s);
  Mat q(s, na);
  constexpr int kMaxSweeps = 1000000;
  for (int sweep = 0;; ++sweep) {
    for (int a = 0; a < na; ++a) q.col(a) = r + mdp.gamma * mdp.transitions[static_cast<std::size_t>(a)] * v;
    const Vec next = q.rowwise().maxCoeff();
    const double change = (next - v).lpNorm<Eigen::Infinity>();
    v = next;
    if (change < 1e-12 * (1.0 + v.lpNorm<Eigen::Infinity>())) break;
    if (sweep == kMaxSweeps) throw NumericalError("value iteration did not converge");
  }
  for (int a = 0; a < na; ++a) q.col(a) = r + mdp.gamma * mdp.transitions[static_cast<std::size_t>(a)] * v;

  TabularSolution sol;
  sol.policy.resize(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) {
    const double best = q.row(i).maxCoeff();
    const double tol = 1e-9 * (1.0 + std::abs(best));
    int a = 0;
    while (q(i, a) < best - tol) ++a;
    sol.policy[static_cast<std::size_t>(i)] = a;
  }
  sol.q = q;
  sol.v = v;
  sol.occupancy = discounted_occupancy(mdp, deterministic_table(sol.policy, na));
  sol.mu = mdp.features.transpose() * sol.occupancy;
  return sol;
}

Vec TabularQ::values(const Vec& state) const {
  const auto i = static_cast<Eigen::Index>(std::llround(state[0]));
  if (i < 0 || i >= q_.rows()) throw ConfigError("tabular state index out of range");
  return q_.row(i).transpose();
}

TabularEnvironment::TabularEnvironment(TabularMDP mdp) : mdp_(std::move(mdp)) { mdp_.validate(); }

namespace {

int draw(const Eigen::Ref<const Vec>& p, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  int last = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    last = static_cast<int>(i);
    acc += p[i];
    if (u < acc) return last;
  }
  return last;
}

}  // namespace

Vec TabularEnvironment::initial_state(Rng& rng) const {
  Vec s(1);
  s[0] = draw(mdp_.initial, rng);
  return s;
}

env::EnvStep TabularEnvironment::step(const Vec& state, int action, Rng& rng) const {
  if (action < 0 || action >= n_actions()) throw ConfigError("invalid tabular action " + std::to_string(action));
  const auto i = static_cast<Eigen::Index>(std::llround(state[0]));
  if (i < 0 || i >= mdp_.n_states()) throw ConfigError("tabular state index out of range");
  Vec next(1);
  next[0] = draw(mdp_.transitions[static_cast<std::size_t>(action)].row(i).transpose(), rng);
  return {next, false};
}

Vec TabularFeatures::operator()(const Vec& state, int) const {
  const auto i = static_cast<Eigen::Index>(std::llround(state[0]));
  if (i < 0 || i >= features_.rows()) throw ConfigError("tabular state index out of range");
  return features_.row(i).transpose();
}

namespace {

struct GridShape {
  int nx, ny;
};

GridShape grid_shape(const env::Map2DConfig& cfg, double cell) {
  const double fx = (cfg.x_max - cfg.x_min) / cell;
  const double fy = (cfg.y_max - cfg.y_min) / cell;
  const auto nx = static_cast<int>(std::lround(fx));
  const auto ny = static_cast<int>(std::lround(fy));
  if (nx < 1 || ny < 1 || std::abs(fx - nx) > 1e-9 * fx || std::abs(fy - ny) > 1e-9 * fy) {
    throw ConfigError("cell size must divide the map extent");
  }
  return {nx, ny};
}

}  // namespace

Vec map2d_cell_center(const env::Map2DConfig& cfg, double cell, int state) {
  const GridShape g = grid_shape(cfg, cell);
  Vec c(2);
  c << cfg.x_min + (state % g.nx + 0.5) * cell, cfg.y_min + (state / g.nx + 0.5) * cell;
  return c;
}

TabularMDP discretized_map2d(const env::Map2DConfig& cfg, double cell, double gamma) {
  cfg.validate();
  if (!(cell > 0.0)) throw ConfigError("cell size must be positive");
  const GridShape g = grid_shape(cfg, cell);
  const int n = g.nx * g.ny;

  // Probability that a step moves j cells, j = 0, 1, ...: delta in
  // [(j - 1/2) cell, (j + 1/2) cell) under N(mean, std) truncated to delta >= 0.
  const double m = cfg.step_mean, sd = cfg.step_std;
  auto normal_cdf = [&](double x) {
    if (sd == 0.0) return x >= m ? 1.0 : 0.0;
    return 0.5 * std::erfc(-(x - m) / (sd * std::sqrt(2.0)));
  };
  const double mass0 = normal_cdf(0.0);
  auto trunc_cdf = [&](double x) { return x <= 0.0 ? 0.0 : (normal_cdf(x) - mass0) / (1.0 - mass0); };
  std::vector<double> jump;
  for (int j = 0;; ++j) {
    const double p = trunc_cdf((j + 0.5) * cell) - trunc_cdf((j - 0.5) * cell);
    jump.push_back(p);
    if ((j - 0.5) * cell > m + 12.0 * sd) break;
  }

  TabularMDP mdp;
  mdp.gamma = gamma;
  mdp.transitions.assign(4, Mat::Zero(n, n));
  for (int s = 0; s < n; ++s) {
    const int ix = s % g.nx, iy = s / g.nx;
    for (int a = 0; a < 4; ++a) {
      for (std::size_t j = 0; j < jump.size(); ++j) {
        const int step = static_cast<int>(j);
        int tx = ix, ty = iy;
        switch (a) {
          case env::kUp: ty = std::min(iy + step, g.ny - 1); break;
          case env::kDown: ty = std::max(iy - step, 0); break;
          case env::kLeft: tx = std::max(ix - step, 0); break;
          default: tx = std::min(ix + step, g.nx - 1); break;
        }
        mdp.transitions[static_cast<std::size_t>(a)](s, tx + g.nx * ty) += jump[j];
      }
      auto row = mdp.transitions[static_cast<std::size_t>(a)].row(s);
      row /= row.sum();
    }
  }
  mdp.features.resize(n, 2);
  mdp.initial = Vec::Zero(n);
  for (int s = 0; s < n; ++s) {
    const Vec c = map2d_cell_center(cfg, cell, s);
    mdp.features.row(s) = c.transpose();
    const bool start = c[0] >= cfg.start_low && c[0] <= cfg.start_high && c[1] >= cfg.start_low && c[1] <= cfg.start_high;
    if (start) mdp.initial[s] = 1.0;
  }
  if (mdp.initial.sum() == 0.0) throw ConfigError("no cell centre lies in the start region");
  mdp.initial /= mdp.initial.sum();
  mdp.validate();
  return mdp;
}

}  // namespace admissible::solver
