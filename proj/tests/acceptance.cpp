// End-to-end acceptance checks. Each criterion prints one line
//   criterion N: PASS|FAIL  <details>
// and the process exits non-zero on FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "admissible/cli/commands.hpp"
#include "admissible/core/dataset_io.hpp"
#include "admissible/core/grid.hpp"
#include "admissible/env/collect.hpp"
#include "admissible/solver/tabular.hpp"

using namespace admissible;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string vec_str(const Vec& w) {
  std::ostringstream o;
  o << '[';
  for (Eigen::Index i = 0; i < w.size(); ++i) o << (i ? ", " : "") << std::round(w[i] * 1000.0) / 1000.0;
  o << ']';
  return o.str();
}

fs::path config_path(const std::string& name) { return fs::path(ADMISSIBLE_SOURCE_DIR) / "configs" / name; }

cli::ExperimentConfig load_config(const std::string& name, std::uint64_t seed) {
  cli::ExperimentConfig cfg = cli::ExperimentConfig::load(config_path(name), &seed);
  cfg.out_dir = fs::temp_directory_path() / ("admissible_acceptance_" + std::to_string(seed));
  return cfg;
}

cli::Experiment build(const cli::ExperimentConfig& cfg) { return cli::Experiment(cfg, cli::collect_dataset(cfg)); }

/// Table S x A of action probabilities as a policy over [index] states.
Policy table_policy(const Mat& probs) {
  return Policy::boltzmann(std::make_shared<solver::TabularQ>(probs.array().log().matrix()), 1.0, "table");
}

// 1. PDIS against the exact occupancy solve.
Outcome criterion_1() {
  const auto t0 = Clock::now();
  Rng rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  solver::TabularMDP m;
  m.gamma = 0.8;
  for (int a = 0; a < 2; ++a) {
    Mat p(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) p(i, j) = 0.1 + u(rng);
    m.transitions.push_back((p.array().colwise() / p.rowwise().sum().array()).matrix());
  }
  m.initial = Vec::Constant(3, 1.0 / 3.0);
  m.features = Mat(3, 2);
  for (int i = 0; i < 3; ++i) m.features.row(i) << 0.5 + u(rng), 0.5 + u(rng);

  const std::vector<int> target{1, 0, 1};
  Mat behaviour(3, 2);
  for (int s = 0; s < 3; ++s) {
    const double p = 0.7 + 0.2 * u(rng);  // probability of the target's action
    behaviour(s, target[s]) = p;
    behaviour(s, 1 - target[s]) = 1.0 - p;
  }
  const Vec mu_exact = solver::policy_feature_expectations(m, solver::deterministic_table(target, 2));

  const solver::TabularEnvironment env(m);
  const BatchDataset data = env::collect_batch(env, table_policy(behaviour), 100000, 80, 11);
  const Policy pi = Policy::greedy(std::make_shared<solver::TabularQ>(solver::deterministic_table(target, 2)));
  const auto est = ope::pdis_mu(data, pi, solver::TabularFeatures(m.features), m.gamma);
  const double rel = (est.mean - mu_exact).lpNorm<Eigen::Infinity>() / mu_exact.lpNorm<Eigen::Infinity>();
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "relative error " << rel << " (< 0.02), mu_hat " << vec_str(est.mean) << " vs exact " << vec_str(mu_exact)
    << ", " << secs << " s (< 60)";
  return {rel < 0.02 && secs < 60.0, d.str()};
}

// 2. Coverage of the empirical Bernstein lower bound.
Outcome criterion_2() {
  const auto t0 = Clock::now();
  Rng rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double true_mean = 0.25;  // E[U V], U, V ~ U[0, 1]
  int covered = 0;
  for (int r = 0; r < 1000; ++r) {
    Vec x(50);
    for (auto& e : x) e = u(rng) * u(rng);
    if (ope::bernstein_lower_bound(x, {.delta = 0.05, .b = 1.0}) <= true_mean) ++covered;
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << covered << "/1000 resamples covered (>= 950), " << secs << " s (< 30)";
  return {covered >= 950 && secs < 30.0, d.str()};
}

// 3. The coordinate-wise lower bound is at least as conservative as the
//    scalar bound on the projected per-trajectory values.
Outcome criterion_3() {
  Rng rng(99);
  std::uniform_int_distribution<int> n_dist(2, 200), k_dist(1, 6);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = -1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = n_dist(rng), k = k_dist(rng);
    ope::FeatureExpectationEstimate est;
    est.per_trajectory = Mat(n, k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) est.per_trajectory(i, j) = g(rng) * (1.0 + j) + (trial % 3) * g(rng) * g(rng);
    est.mean = est.per_trajectory.colwise().mean().transpose();
    est.n_trajectories = static_cast<std::size_t>(n);
    Vec w(k);
    for (auto& e : w) e = g(rng);
    const RewardWeights rw = RewardWeights::normalized(w);
    const ope::BoundConfig cfg{.delta = 0.01 + 0.2 * (trial % 5) / 4.0, .b = 1.0};
    const double lhs = rw.values().dot(ope::mu_lower_bound(est, rw, cfg));
    const Vec values = est.per_trajectory * rw.values();
    const double rhs = values.mean() - ope::bernstein_deviation(values, cfg.delta);
    worst = std::max(worst, lhs - rhs);
  }
  std::ostringstream d;
  d << "max (w'mu_lb - scalar bound) over 1000 pairs = " << worst << " (<= 1e-9)";
  return {worst <= 1e-9, d.str()};
}

std::vector<polytope::SweepRow> consistency_sweep(const cli::Experiment& exp, double epsilon) {
  polytope::Thresholds t = exp.thresholds();
  t.epsilon = epsilon;
  t.enable_evaluability = false;
  const auto grid = exp.grid();
  const auto evals = polytope::evaluate_grid(grid, exp.solver_fn(), nullptr, exp.config().jobs);
  return polytope::sweep_verdicts(grid, evals, exp.mu_b(), t, exp.config().seed);
}

std::string accepted_str(const std::vector<polytope::SweepRow>& rows) {
  std::string s;
  for (const auto& r : rows)
    if (r.verdict.accepted) s += vec_str(r.w.values());
  return s.empty() ? "{}" : s;
}

const std::uint64_t kMapSeeds[] = {7, 8, 9};

// 4. Only the optimized reward survives the consistency check on the map.
Outcome criterion_4() {
  const auto t0 = Clock::now();
  bool all = true;
  std::ostringstream d;
  for (std::uint64_t seed : kMapSeeds) {
    const cli::Experiment exp = build(load_config("map2d.toml", seed));
    const auto rows = consistency_sweep(exp, 1.0);
    bool only_target = true;
    for (const auto& r : rows) {
      const bool target = std::abs(r.w[0] - 0.5) < 1e-12 && std::abs(r.w[1] - 0.5) < 1e-12;
      only_target = only_target && (r.verdict.accepted == target);
    }
    all = all && only_target;
    d << "seed " << seed << " accepted " << accepted_str(rows) << "; ";
  }
  const double secs = seconds_since(t0);
  d << secs << " s (< 600); expected {[0.5, 0.5]} for every seed";
  return {all && secs < 600.0, d.str()};
}

// 5. Every rejection comes with a halfspace that excludes the point, and the
//    exact tabular oracle is idempotent.
Outcome criterion_5() {
  std::ostringstream d;
  bool ok = true;
  const cli::Experiment exp = build(load_config("map2d.toml", kMapSeeds[0]));
  const auto rows = consistency_sweep(exp, 1.0);
  int rejected = 0;
  for (const auto& r : rows) {
    if (r.verdict.accepted) continue;
    ++rejected;
    const bool cut = r.verdict.halfspace && r.verdict.halfspace->violation(r.w.values()) > 1e-9;
    ok = ok && cut;
  }
  d << rejected << " FQI rejections all separated: " << (ok ? "yes" : "no") << "; ";

  const env::Map2DConfig map = exp.config().map2d;
  const solver::TabularMDP m = solver::discretized_map2d(map, 0.5, 0.9);
  const Vec mu_b = solver::tabular_solve(m, RewardWeights(Vec::Constant(2, 0.5))).mu;
  polytope::SolverFn exact = [&](const RewardWeights& w) {
    const auto s = solver::tabular_solve(m, w);
    return polytope::exact_evaluation(Policy::greedy(std::make_shared<solver::TabularQ>(s.q)), s.mu);
  };
  int accepted = 0, stable = 0, tab_rejected = 0, tab_cut = 0;
  // Exact evaluations have mu_lb = mu, so only Delta = 0 lets positive-value points through evaluability.
  for (const auto& [eps, cap] : {std::pair{0.25, 0.0}, {1.0, 0.0}, {0.25, 0.5}, {1.0, 0.5}}) {
    polytope::Thresholds t;
    t.epsilon = eps;
    t.delta_cap = cap;
    for (const auto& w : l1_ball_grid(2, 0.25)) {
      const auto first = polytope::separation_oracle(w, exact, mu_b, t);
      const auto second = polytope::separation_oracle(w, exact, mu_b, t);
      if (first.accepted) {
        ++accepted;
        if (second.accepted) ++stable;
      } else {
        ++tab_rejected;
        if (!second.accepted && first.halfspace->violation(w.values()) > 1e-9) ++tab_cut;
      }
    }
  }
  d << "tabular: " << stable << "/" << accepted << " acceptances repeated, " << tab_cut << "/" << tab_rejected
    << " rejections repeated and separated";
  ok = ok && accepted > 0 && stable == accepted && tab_cut == tab_rejected;
  return {ok, d.str()};
}

Outcome goal_direction(const std::string& config, double epsilon, double delta_cap) {
  const auto t0 = Clock::now();
  const cli::ExperimentConfig cfg = cli::ExperimentConfig::load(config_path(config));
  const cli::Experiment exp = build(cfg);
  polytope::Thresholds t = exp.thresholds();
  t.epsilon = epsilon;
  t.delta_cap = delta_cap;
  const auto grid = l1_ball_grid(3, 0.2);
  const auto evals = polytope::evaluate_grid(grid, exp.solver_fn(), nullptr, cfg.jobs);
  const auto rows = polytope::sweep_verdicts(grid, evals, exp.mu_b(), t, cfg.seed);
  std::size_t n = 0;
  bool goal_ok = true;
  for (const auto& r : rows) {
    if (!r.verdict.accepted) continue;
    ++n;
    goal_ok = goal_ok && r.w[2] >= 0.0;
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << config << " eps " << epsilon << " Delta " << delta_cap << ": " << n << " admitted " << accepted_str(rows)
    << ", goal weight >= 0 for all: " << (goal_ok ? "yes" : "no") << ", " << secs << " s";
  return {n > 0 && goal_ok && secs < 1800.0, d.str()};
}

// 6. Benchmark admissible sets lean towards the goal indicator.
Outcome criterion_6() {
  const Outcome mc = goal_direction("mountain_car.toml", 0.98, 0.50);
  const Outcome ac = goal_direction("acrobot.toml", 1.00, 1.80);
  return {mc.pass && ac.pass, mc.detail + " | " + ac.detail};
}

fpl::FplResult hiv_fpl(const cli::Experiment& exp, const Vec& w0) {
  fpl::FplConfig f = exp.config().fpl;
  f.thresholds = exp.thresholds();
  return fpl::fpl_run(RewardWeights::normalized(w0), f, exp.solver_fn(), exp.mu_b());
}

const std::uint64_t kHivSeeds[] = {1, 2, 3};

// 7. FPL on HIV redistributes weight into the expected sign patterns.
Outcome criterion_7() {
  int first_ok = 0, second_ok = 0;
  std::ostringstream d;
  for (std::uint64_t seed : kHivSeeds) {
    cli::ExperimentConfig cfg = load_config("hiv.toml", seed);
    cfg.fpl.seed = derive_seed(seed, 5);
    const cli::Experiment exp = build(cfg);
    const Vec a = hiv_fpl(exp, (Vec(3) << -1.0, 1.0, -1.0).finished()).w_bar.values();
    const Vec b = hiv_fpl(exp, (Vec(3) << 0.0, 1.0, 0.0).finished()).w_bar.values();
    const bool pa = a[0] < 0 && a[1] > 0 && a[2] < 0 && std::abs(a[1]) >= std::abs(a[0]) && std::abs(a[1]) >= std::abs(a[2]);
    const bool pb = b[0] <= 0 && b[2] <= 0;
    first_ok += pa;
    second_ok += pb;
    d << "seed " << seed << ": " << vec_str(a) << (pa ? " ok" : " no") << ", " << vec_str(b) << (pb ? " ok" : " no")
      << "; ";
  }
  d << "pattern counts " << first_ok << "/3 and " << second_ok << "/3 (>= 2 each)";
  return {first_ok >= 2 && second_ok >= 2, d.str()};
}

// 8. FPL's final mixture is better supported by the batch than the start.
Outcome criterion_8() {
  const cli::ExperimentConfig cfg = cli::ExperimentConfig::load(config_path("hiv.toml"));
  const cli::Experiment exp = build(cfg);
  const std::vector<Vec> inits{(Vec(3) << 1, 0, 0).finished(), (Vec(3) << 0, 1, 0).finished(),
                               (Vec(3) << 0, 0, 1).finished(), (Vec(3) << 1, 1, 1).finished()};
  bool ok = true;
  std::ostringstream d;
  for (const Vec& w0 : inits) {
    const RewardWeights w = RewardWeights::normalized(w0);
    const double before = ope::kish_ess(exp.evaluate(w).rho);
    const fpl::FplResult r = hiv_fpl(exp, w0);
    const double after = ope::kish_ess(ope::trajectory_weights(exp.data(), r.pi_final, exp.pdis_options()));
    ok = ok && after >= before;
    d << vec_str(w.values()) << " N_eff " << before << " -> " << vec_str(r.w_bar.values()) << " N_eff " << after
      << "; ";
  }
  return {ok, d.str()};
}

// 9. Dykstra projection against a coarse-to-fine grid search.
struct GridComparison {
  double gap;     // |grid minimizer - projection|
  double slack;   // |projection - w0| - |grid minimizer - w0|; > 0 means the grid found a closer point
};

GridComparison grid_search_distance(const Vec& w0, const std::vector<polytope::Halfspace>& hs, const Vec& found) {
  const int k = static_cast<int>(w0.size());
  auto feasible = [&](const Vec& x) {
    if (x.lpNorm<1>() > 1.0) return false;
    for (const auto& h : hs)
      if (h.violation(x) > 0.0) return false;
    return true;
  };
  // Levels: step 0.05 over [-1, 1]^k, then 0.01 and 0.001 windows of +-2 coarse steps.
  Vec centre = Vec::Zero(k);
  double half = 1.0;
  Vec best;
  for (double step : {0.05, 0.01, 0.001}) {
    const int n = static_cast<int>(std::lround(2.0 * half / step)) + 1;
    double best_d = 1e300;
    Vec x(k);
    std::vector<int> idx(static_cast<std::size_t>(k), 0);
    while (true) {
      for (int i = 0; i < k; ++i) x[i] = std::round((centre[i] - half + idx[static_cast<std::size_t>(i)] * step) / step) * step;
      if (feasible(x)) {
        const double dist = (x - w0).squaredNorm();
        if (dist < best_d) {
          best_d = dist;
          best = x;
        }
      }
      int i = 0;
      while (i < k && ++idx[static_cast<std::size_t>(i)] == n) idx[static_cast<std::size_t>(i++)] = 0;
      if (i == k) break;
    }
    if (best.size() == 0) return {1e300, 1e300};
    centre = best;
    half = 2.0 * step;
  }
  return {(best - found).norm(), (found - w0).norm() - (best - w0).norm()};
}

Outcome criterion_9() {
  const auto t0 = Clock::now();
  Rng rng(2023);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> k_dist(2, 4), m_dist(1, 6);
  double worst = 0.0, worst_slack = -1e300;
  for (int inst = 0; inst < 50; ++inst) {
    const int k = k_dist(rng), m = m_dist(rng);
    // A strictly feasible centre inside half the l1 ball keeps the set fat.
    Vec c(k);
    for (auto& e : c) e = g(rng);
    c *= 0.4 * u(rng) / c.lpNorm<1>();
    std::vector<polytope::Halfspace> hs;
    for (int j = 0; j < m; ++j) {
      Vec a(k);
      for (auto& e : a) e = g(rng);
      a /= a.norm();
      hs.push_back({a, a.dot(c) + 0.1 + 0.3 * u(rng), polytope::Sense::kLessEqual});
    }
    Vec w0(k);
    for (auto& e : w0) e = g(rng);
    w0 /= w0.lpNorm<1>();
    const Vec found = fpl::nearest_admissible_point(w0, hs).point;
    const GridComparison g_cmp = grid_search_distance(w0, hs, found);
    worst = std::max(worst, g_cmp.gap);
    worst_slack = std::max(worst_slack, g_cmp.slack);
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "max distance to grid minimizer " << worst << " (< 2e-3) over 50 instances, " << secs
    << " s (< 60); projection distance minus grid distance at most " << worst_slack;
  return {worst < 2e-3 && secs < 60.0, d.str()};
}

// 10. Projection cost grows slowly with the dimension at fixed constraint count.
double projection_seconds(int k, int reps) {
  Rng rng(static_cast<std::uint64_t>(k));
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> times;
  for (int r = 0; r < reps; ++r) {
    std::vector<polytope::Halfspace> hs;
    for (int j = 0; j < 10; ++j) {
      Vec a(k);
      for (auto& e : a) e = g(rng);
      hs.push_back({a / a.norm(), 0.05 + 0.1 * std::abs(g(rng)), polytope::Sense::kLessEqual});
    }
    Vec w0(k);
    for (auto& e : w0) e = g(rng);
    w0 /= w0.lpNorm<1>();
    const auto t0 = Clock::now();
    fpl::nearest_admissible_point(w0, hs);
    times.push_back(seconds_since(t0));
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

Outcome criterion_10() {
  const double t3 = projection_seconds(3, 41);
  const double t100 = projection_seconds(100, 41);
  std::ostringstream d;
  d << "median projection time k=3 " << t3 * 1e3 << " ms, k=100 " << t100 * 1e3 << " ms, ratio " << t100 / t3
    << " (< 10)";
  return {t100 < 10.0 * t3, d.str()};
}

// 11. Byte-identical outputs from repeated CLI runs.
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome criterion_11() {
  const fs::path root = fs::temp_directory_path() / "admissible_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg = root / "tiny.toml";
  std::ofstream(cfg) << "seed = 5\njobs = 2\n[env]\nname = \"map2d\"\n[batch]\nsize = 40\nhorizon = 15\n"
                        "[expert]\ntrajectories = 60\nhorizon = 15\niterations = 10\nn_trees = 10\ntemperature = 1.0\n"
                        "[solver]\ngamma = 0.9\niterations = 10\nn_trees = 10\npolicy_temperature = 1.0\n"
                        "[polytope]\nepsilon = 0.5\ndelta_cap = 0.9\ngrid_step = 0.5\n"
                        "[fpl]\niterations = 4\nw_init = [0.5, 0.5]\n";
  const std::vector<std::string> commands{"collect", "train --w 0.5,0.5", "train", "sweep", "fpl", "eval --w 1,0", "plot"};
  for (const char* run : {"a", "b"}) {
    for (const auto& c : commands) {
      const std::string cmd = std::string(ADMISSIBLE_CLI_PATH) + " " + c + " --config " + cfg.string() + " --out " +
                              (root / run).string() + " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + c};
    }
  }
  std::size_t compared = 0;
  std::vector<std::string> differing;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const fs::path other = root / "b" / entry.path().filename();
    ++compared;
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) differing.push_back(entry.path().filename().string());
  }
  std::ostringstream d;
  d << compared << " output files compared across two runs of " << commands.size() << " commands; differing: "
    << (differing.empty() ? "none" : "");
  for (const auto& f : differing) d << f << ' ';
  bool complete = true;
  for (const char* f : {cli::kDatasetFile, cli::kSweepCsv, cli::kTraceFile, cli::kFplReport, cli::kEvalCsv}) {
    if (!fs::exists(root / "a" / f)) {
      complete = false;
      d << " missing: " << f;
    }
  }
  fs::remove_all(root);
  return {complete && differing.empty(), d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  int criterion = 0;
  app.add_option("--criterion", criterion, "Criterion number (1-11); 0 runs all")->check(CLI::Range(0, 11));
  CLI11_PARSE(app, argc, argv);

  using Fn = Outcome (*)();
  const Fn table[] = {criterion_1, criterion_2, criterion_3, criterion_4,  criterion_5, criterion_6,
                      criterion_7, criterion_8, criterion_9, criterion_10, criterion_11};
  int failures = 0;
  for (int n = 1; n <= 11; ++n) {
    if (criterion != 0 && n != criterion) continue;
    Outcome o;
    try {
      o = table[n - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
