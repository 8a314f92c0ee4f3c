#include <gtest/gtest.h>

#include <sstream>

#include "admissible/fpl/fpl.hpp"

using namespace admissible;
using namespace admissible::fpl;
using polytope::Halfspace;
using polytope::Sense;

namespace {

Vec v(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

std::vector<Halfspace> random_halfspaces(int k, int m, Rng& rng) {
  // Every halfspace contains a small ball around the origin, so the set is feasible.
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.05, 0.5);
  std::vector<Halfspace> out;
  for (int i = 0; i < m; ++i) {
    Vec a(k);
    for (auto& x : a) x = n(rng);
    out.push_back({a / a.norm(), u(rng), Sense::kLessEqual});
  }
  return out;
}

/// mu = w itself (a policy that "follows" its reward), exact.
polytope::PolicyEvaluation mirror(const RewardWeights& w) {
  return polytope::exact_evaluation(Policy::uniform(2), w.values());
}

}  // namespace

TEST(L1Projection, InsideIsUnchangedOutsideLandsOnSphere) {
  const Vec in = v({0.2, -0.3});
  EXPECT_EQ(project_l1_ball(in, 1.0), in);
  const Vec p = project_l1_ball(v({2.0, 1.0}), 1.0);
  EXPECT_NEAR(p[0], 1.0, 1e-12);
  EXPECT_NEAR(p[1], 0.0, 1e-12);
  const Vec q = project_l1_ball(v({0.8, -0.6, 0.1}), 1.0);
  EXPECT_NEAR(q.lpNorm<1>(), 1.0, 1e-12);
}

TEST(Projection, NoHalfspacesIsIdentityInsideBall) {
  const Vec w = v({0.25, -0.75});
  const auto r = nearest_admissible_point(w, {});
  EXPECT_LT((r.point - w).norm(), 1e-12);
}

TEST(Projection, SingleHalfspaceExample) {
  const auto r = nearest_admissible_point(v({1.0, 0.0}), {{v({1.0, 0.0}), 0.5, Sense::kLessEqual}});
  EXPECT_NEAR(r.point[0], 0.5, 1e-7);
  EXPECT_NEAR(r.point[1], 0.0, 1e-7);
}

TEST(Projection, SatisfiesEveryConstraintAndIsIdempotent) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto hs = random_halfspaces(3, 6, rng);
    std::normal_distribution<double> n(0.0, 1.0);
    const Vec w0 = RewardWeights::normalized(v({n(rng), n(rng), n(rng)})).values();
    const auto r = nearest_admissible_point(w0, hs);
    for (const auto& h : hs) EXPECT_LE(h.violation(r.point), 1e-7);
    EXPECT_LE(r.point.lpNorm<1>(), 1.0 + 1e-7);
    const auto again = nearest_admissible_point(r.point, hs);
    EXPECT_LT((again.point - r.point).norm(), 1e-6);
  }
}

TEST(Projection, NoRandomFeasiblePointIsCloser) {
  Rng rng(11);
  const auto hs = random_halfspaces(2, 4, rng);
  const Vec w0 = v({0.9, 0.1});
  const auto r = nearest_admissible_point(w0, hs);
  const double best = (r.point - w0).norm();
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int feasible = 0;
  for (int i = 0; i < 10000; ++i) {
    const Vec x = v({u(rng), u(rng)});
    if (x.lpNorm<1>() > 1.0) continue;
    bool ok = true;
    for (const auto& h : hs) ok = ok && h.contains(x);
    if (!ok) continue;
    ++feasible;
    EXPECT_GE((x - w0).norm(), best - 1e-6);
  }
  EXPECT_GT(feasible, 100);
}

TEST(Projection, DoesNotStopWhileCorrectionsDrift) {
  // Many active faces near a vertex slow Dykstra down; the result must still beat every sample.
  Rng rng(2023);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto hs = random_halfspaces(2, 6, rng);
    const Vec w0 = RewardWeights::normalized(v({u(rng), u(rng)})).values();
    const Vec p = nearest_admissible_point(w0, hs).point;
    const double best = (p - w0).norm();
    for (int i = 0; i < 4000; ++i) {
      const Vec x = v({u(rng), u(rng)});
      if (x.lpNorm<1>() > 1.0) continue;
      bool ok = true;
      for (const auto& h : hs) ok = ok && h.contains(x);
      if (ok) {
        EXPECT_GE((x - w0).norm(), best - 1e-6);
      }
    }
  }
}

TEST(Projection, ExactFallbackAgreesWithDykstra) {
  Rng rng(17);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 2 + trial % 4;
    const auto hs = random_halfspaces(k, 5, rng);
    Vec w0(k);
    for (auto& x : w0) x = n(rng);
    w0 /= w0.lpNorm<1>();
    const auto dykstra = nearest_admissible_point(w0, hs);
    const auto exact = nearest_admissible_point(w0, hs, 1.0, {.tolerance = 1e-8, .max_cycles = 1});
    if (dykstra.cycles <= 1) continue;
    EXPECT_TRUE(exact.exact_fallback);
    EXPECT_LT((exact.point - dykstra.point).norm(), 1e-6);
  }
}

TEST(Projection, NearlyParallelHalfspacesStillCertify) {
  // A thin wedge through the origin, the shape FPL cuts take with badly scaled features.
  const Vec a = v({-0.0148, -0.9982, 0.0593}), b = v({-0.0317, -0.9977, 0.0585});
  const std::vector<Halfspace> hs{{a, 0.0, Sense::kGreaterEqual}, {b, 0.0, Sense::kLessEqual}, {b, 0.0, Sense::kLessEqual}};
  const auto r = nearest_admissible_point(v({-1.0 / 3, 1.0 / 3, -1.0 / 3}), hs);
  for (const auto& h : hs) EXPECT_LE(h.violation(r.point), 1e-8);
  EXPECT_LE(r.point.lpNorm<1>(), 1.0 + 1e-8);
}

TEST(Projection, ContradictoryHalfspacesAreInfeasible) {
  const std::vector<Halfspace> hs{{v({1.0, 0.0}), 0.6, Sense::kGreaterEqual}, {v({1.0, 0.0}), 0.4, Sense::kLessEqual}};
  EXPECT_THROW(nearest_admissible_point(v({0.5, 0.5}), hs, 1.0, {.tolerance = 1e-8, .max_cycles = 2000}),
               InfeasibleError);
  const std::vector<Halfspace> outside{{v({1.0, 0.0}), 2.0, Sense::kGreaterEqual}};
  EXPECT_THROW(nearest_admissible_point(v({0.5, 0.5}), outside, 1.0, {.tolerance = 1e-8, .max_cycles = 2000}),
               InfeasibleError);
}

TEST(Fpl, NoConstraintsKeepsInitialWeights) {
  FplConfig cfg;
  cfg.iterations = 5;
  cfg.thresholds.enable_consistency = false;
  cfg.thresholds.enable_evaluability = false;
  const RewardWeights w0(v({0.3, -0.7}));
  const FplResult r = fpl_run(w0, cfg, mirror, v({1.0, 1.0}));
  EXPECT_TRUE(r.halfspaces.empty());
  EXPECT_LT((r.w_bar.values() - w0.values()).norm(), 1e-9);
  ASSERT_EQ(r.trace.size(), 5u);
  for (const auto& it : r.trace) {
    EXPECT_NEAR(it.solver_weights.lpNorm<1>(), 1.0, 1e-12);
    EXPECT_EQ(it.n_halfspaces, 0u);
  }
}

TEST(Fpl, SameSeedSameTrace) {
  FplConfig cfg;
  cfg.iterations = 6;
  cfg.seed = 99;
  cfg.thresholds.epsilon = 0.2;
  cfg.thresholds.delta_cap = 0.5;
  const Vec mu_b = v({0.6, 0.2});
  std::ostringstream a, b;
  write_trace_jsonl(a, fpl_run(RewardWeights(v({1.0, 0.0})), cfg, mirror, mu_b).trace);
  write_trace_jsonl(b, fpl_run(RewardWeights(v({1.0, 0.0})), cfg, mirror, mu_b).trace);
  EXPECT_EQ(a.str(), b.str());
  cfg.seed = 100;
  std::ostringstream c;
  write_trace_jsonl(c, fpl_run(RewardWeights(v({1.0, 0.0})), cfg, mirror, mu_b).trace);
  EXPECT_NE(a.str(), c.str());
}

TEST(Fpl, IteratesRespectAccumulatedConstraints) {
  FplConfig cfg;
  cfg.iterations = 8;
  cfg.seed = 5;
  cfg.thresholds.epsilon = 0.1;
  cfg.thresholds.enable_evaluability = false;
  const FplResult r = fpl_run(RewardWeights(v({0.0, 1.0})), cfg, mirror, v({0.9, -0.4}));
  for (const auto& it : r.trace) {
    for (std::size_t j = 0; j < it.n_halfspaces; ++j) EXPECT_LE(r.halfspaces[j].violation(it.w), 1e-7);
    EXPECT_LE(it.w.lpNorm<1>(), 1.0 + 1e-7);
  }
  EXPECT_NEAR(r.w_bar.l1_norm(), 1.0, 1e-12);
}

TEST(Fpl, LeaderSumsUnitNormIterates) {
  FplConfig cfg;
  cfg.iterations = 3;
  cfg.seed = 8;
  cfg.perturbation = "damped";
  cfg.thresholds.epsilon = 0.1;
  cfg.thresholds.enable_evaluability = false;
  const Vec w0 = v({0.0, 1.0});
  const FplResult r = fpl_run(RewardWeights(w0), cfg, mirror, v({0.9, -0.4}));
  Vec expected = w0;
  for (std::size_t t = 0; t < r.trace.size(); ++t) {
    const auto& it = r.trace[t];
    EXPECT_LT((it.leader - (expected + static_cast<double>(t + 1) * it.p)).norm(), 1e-12);
    expected += it.w / it.w.lpNorm<1>();
  }
}

TEST(Fpl, PerturbationPresets) {
  FplConfig cfg;
  cfg.iterations = 16;
  EXPECT_DOUBLE_EQ(cfg.perturbation_scale(3), 12.0);
  cfg.perturbation = "damped";
  EXPECT_DOUBLE_EQ(cfg.perturbation_scale(3), 1.0 / 12.0);
  cfg.scale = 0.7;
  EXPECT_DOUBLE_EQ(cfg.perturbation_scale(3), 0.7);
  cfg.perturbation = "other";
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Fpl, RejectsUnnormalizedStart) {
  FplConfig cfg;
  EXPECT_THROW(fpl_run(RewardWeights(v({2.0, 0.0})), cfg, mirror, v({1.0, 1.0})), ConfigError);
}
