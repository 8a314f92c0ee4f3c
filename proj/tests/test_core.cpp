#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "admissible/core/dataset_io.hpp"
#include "admissible/core/features.hpp"
#include "admissible/core/grid.hpp"
#include "admissible/core/policy.hpp"

using namespace admissible;

namespace {

Vec v(std::initializer_list<double> xs) {
  Vec out(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) out[i++] = x;
  return out;
}

/// phi(s) = s over 2-D states.
FeatureMapPtr identity2() { return std::make_shared<IdentityFeatures>(2); }

Trajectory traj(std::vector<Vec> states, std::vector<int> actions, std::vector<double> probs) {
  Vec last = states.back();
  return Trajectory(std::move(states), std::move(actions), std::move(probs), last, false);
}

class ConstantQ final : public ActionValueFunction {
 public:
  explicit ConstantQ(Vec q) : q_(std::move(q)) {}
  int n_actions() const override { return static_cast<int>(q_.size()); }
  Vec values(const Vec&) const override { return q_; }

 private:
  Vec q_;
};

class StateQ final : public ActionValueFunction {
 public:
  int n_actions() const override { return 3; }
  Vec values(const Vec& s) const override { return v({s[0], -s[0], 0.3 * s[1]}); }
};

}  // namespace

TEST(DiscountedFeatureSum, SingleStep) {
  const Trajectory t = traj({v({1, 0})}, {0}, {1.0});
  EXPECT_TRUE(discounted_feature_sum(t, *identity2(), 0.9).isApprox(v({1, 0})));
}

TEST(DiscountedFeatureSum, TwoSteps) {
  const Trajectory t = traj({v({1, 0}), v({0, 1})}, {0, 0}, {1.0, 1.0});
  const Vec s = discounted_feature_sum(t, *identity2(), 0.5);
  EXPECT_DOUBLE_EQ(s[0], 1.0);
  EXPECT_DOUBLE_EQ(s[1], 0.5);
}

TEST(DiscountedFeatureSum, DimensionMismatchIsConfigError) {
  const Trajectory t = traj({v({1, 0, 0})}, {0}, {1.0});
  EXPECT_THROW(discounted_feature_sum(t, *identity2(), 0.9), ConfigError);
}

TEST(DiscountedFeatureSum, LinearInStackedMaps) {
  auto a = identity2();
  auto b = std::make_shared<IdentityFeatures>(2);
  const StackedFeatures stacked({a, b});
  const Trajectory t = traj({v({1, 2}), v({3, -1}), v({0.5, 4})}, {0, 1, 0}, {0.5, 0.5, 0.5});
  const Vec s = discounted_feature_sum(t, stacked, 0.7);
  const Vec p = discounted_feature_sum(t, *a, 0.7);
  EXPECT_TRUE(s.head(2).isApprox(p));
  EXPECT_TRUE(s.tail(2).isApprox(p));
}

TEST(BehaviorFeatureExpectations, MeanOfOne) {
  const Trajectory t = traj({v({1, 2}), v({3, 4})}, {0, 0}, {1.0, 1.0});
  const BatchDataset d({t}, {});
  EXPECT_TRUE(behavior_feature_expectations(d, *identity2(), 0.9).isApprox(discounted_feature_sum(t, *identity2(), 0.9)));
}

TEST(BehaviorFeatureExpectations, MeanOfTwo) {
  const BatchDataset d({traj({v({1, 0})}, {0}, {1.0}), traj({v({0, 1})}, {0}, {1.0})}, {});
  const Vec mu = behavior_feature_expectations(d, *identity2(), 0.9);
  EXPECT_DOUBLE_EQ(mu[0], 0.5);
  EXPECT_DOUBLE_EQ(mu[1], 0.5);
}

TEST(BehaviorFeatureExpectations, MatchesStreamingAndTwoPassMeans) {
  Rng rng(3);
  std::normal_distribution<double> n(0.0, 2.0);
  std::vector<Trajectory> ts;
  for (int i = 0; i < 50; ++i) {
    std::vector<Vec> s;
    for (int t = 0; t < 1 + i % 7; ++t) s.push_back(v({n(rng), n(rng)}));
    ts.push_back(traj(s, std::vector<int>(s.size(), 0), std::vector<double>(s.size(), 1.0)));
  }
  const BatchDataset d(ts, {});
  Vec streaming = Vec::Zero(2);
  Vec sum = Vec::Zero(2);
  int count = 0;
  for (const auto& t : d) {
    const Vec x = discounted_feature_sum(t, *identity2(), 0.95);
    ++count;
    streaming += (x - streaming) / count;
    sum += x;
  }
  const Vec mu = behavior_feature_expectations(d, *identity2(), 0.95);
  EXPECT_LT((mu - streaming).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((mu - sum / count).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BatchDataset, RejectsEmptyAndMixedDimensions) {
  EXPECT_THROW(BatchDataset({}, {}), ConfigError);
  EXPECT_THROW(BatchDataset({traj({v({1, 0})}, {0}, {1.0}), traj({v({1, 0, 0})}, {0}, {1.0})}, {}), ConfigError);
}

TEST(Trajectory, RejectsBadProbabilitiesAndLengths) {
  EXPECT_THROW(traj({v({1, 0})}, {0}, {0.0}), ConfigError);
  EXPECT_THROW(traj({v({1, 0})}, {0}, {1.5}), ConfigError);
  EXPECT_THROW(Trajectory({v({1, 0}), v({0, 0})}, {0}, {1.0}, v({0, 0})), ConfigError);
}

TEST(L1BallGrid, K2Step05) {
  const auto g = l1_ball_grid(2, 0.5);
  ASSERT_EQ(g.size(), 8u);
  std::set<std::pair<double, double>> got;
  for (const auto& w : g) got.insert({w[0], w[1]});
  const std::set<std::pair<double, double>> want{{1, 0},    {-1, 0},    {0, 1},     {0, -1},
                                                 {0.5, 0.5}, {0.5, -0.5}, {-0.5, 0.5}, {-0.5, -0.5}};
  EXPECT_EQ(got, want);
}

TEST(L1BallGrid, K1) {
  const auto g = l1_ball_grid(1, 1.0);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0][0], -1.0);
  EXPECT_EQ(g[1][0], 1.0);
}

TEST(L1BallGrid, K3Step02MatchesBruteForce) {
  // Brute force over all integer vectors in [-5, 5]^3 with |n|_1 = 5.
  std::size_t count = 0;
  for (int a = -5; a <= 5; ++a)
    for (int b = -5; b <= 5; ++b)
      for (int c = -5; c <= 5; ++c) count += std::abs(a) + std::abs(b) + std::abs(c) == 5 ? 1 : 0;
  const auto g = l1_ball_grid(3, 0.2);
  EXPECT_EQ(g.size(), count);
  for (const auto& w : g) EXPECT_EQ(w.l1_norm(), 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    EXPECT_TRUE(std::lexicographical_compare(g[i - 1].values().begin(), g[i - 1].values().end(),
                                             g[i].values().begin(), g[i].values().end()));
  }
}

TEST(L1BallGrid, RejectsNonDividingStep) {
  EXPECT_THROW(l1_ball_grid(2, 0.3), ConfigError);
  EXPECT_THROW(l1_ball_grid(2, 0.0), ConfigError);
}

TEST(L1BallGrid, EveryVectorHasUnitNormExactly) {
  for (double step : {0.5, 0.25, 0.2, 0.1, 0.05}) {
    for (const auto& w : l1_ball_grid(3, step)) EXPECT_LE(std::abs(w.l1_norm() - 1.0), 1e-12);
  }
}

TEST(Boltzmann, SymmetricValuesGiveUniform) {
  for (double t : {0.01, 1.0, 100.0}) {
    const Vec p = boltzmann_action_probs(v({1, 1}), t);
    EXPECT_DOUBLE_EQ(p[0], 0.5);
    EXPECT_DOUBLE_EQ(p[1], 0.5);
  }
}

TEST(Boltzmann, ColdLimit) { EXPECT_NEAR(boltzmann_action_probs(v({1, 0}), 1e-3)[0], 1.0, 1e-2); }

TEST(Boltzmann, UnitTemperature) {
  const Vec p = boltzmann_action_probs(v({1, 0}), 1.0);
  EXPECT_NEAR(p[0], std::exp(1.0) / (std::exp(1.0) + 1.0), 1e-12);
  EXPECT_NEAR(p[0], 0.731, 1e-3);
  EXPECT_NEAR(p[1], 0.269, 1e-3);
}

TEST(Boltzmann, NonPositiveTemperatureIsError) {
  EXPECT_THROW(boltzmann_action_probs(v({1, 0}), 0.0), ConfigError);
  EXPECT_THROW(boltzmann_action_probs(v({1, 0}), -1.0), ConfigError);
}

TEST(Policy, EveryVariantSumsToOne) {
  auto q = std::make_shared<StateQ>();
  const std::vector<Policy> policies{
      Policy::deterministic(3, [](const Vec& s) { return s[0] > 0 ? 2 : 0; }),
      Policy::greedy(q),
      Policy::boltzmann(q, 0.7),
      Policy::uniform(3),
      Policy::mixture({Policy::greedy(q), Policy::boltzmann(q, 2.0), Policy::uniform(3)}),
      Policy::epsilon_biased(Policy::boltzmann(q, 0.3), 1, 0.2),
  };
  Rng rng(11);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    const Vec s = v({n(rng), n(rng)});
    for (const auto& p : policies) {
      const Vec probs = p.action_probs(s);
      EXPECT_NEAR(probs.sum(), 1.0, 1e-9) << p.describe();
      EXPECT_GE(probs.minCoeff(), 0.0);
    }
  }
}

TEST(Policy, MixtureIsArithmeticMean) {
  auto q = std::make_shared<StateQ>();
  const Policy a = Policy::greedy(q), b = Policy::boltzmann(q, 1.3);
  const Policy m = Policy::mixture({a, b});
  const Vec s = v({0.4, -2.0});
  EXPECT_TRUE(m.action_probs(s).isApprox(0.5 * (a.action_probs(s) + b.action_probs(s))));
}

TEST(Policy, EpsilonBiasedAddsBias) {
  const Policy base = Policy::greedy(std::make_shared<ConstantQ>(v({0, 1, 0, 0})));
  const Policy p = Policy::epsilon_biased(base, 2, 0.1);
  const Vec probs = p.action_probs(v({0, 0}));
  EXPECT_NEAR(probs[1], 0.9, 1e-15);
  EXPECT_NEAR(probs[2], 0.1, 1e-15);
}

TEST(Policy, GreedyTiesGoToLowestIndex) {
  EXPECT_EQ(argmax_lowest(v({1, 2})), 1);
  EXPECT_EQ(argmax_lowest(v({3, 3})), 0);
  const Policy p = Policy::greedy(std::make_shared<ConstantQ>(v({3, 3})));
  EXPECT_EQ(p.action_probs(v({0, 0}))[0], 1.0);
}

TEST(Policy, SamplingFollowsProbabilities) {
  Rng rng(5);
  const Vec probs = v({0.2, 0.0, 0.8});
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 20000; ++i) ++counts[sample_action(probs, rng)];
  EXPECT_EQ(counts[1], 0);
  EXPECT_NEAR(counts[0] / 20000.0, 0.2, 0.01);
}

TEST(RewardWeights, Normalization) {
  const RewardWeights w = RewardWeights::normalized(v({2, -2}));
  EXPECT_TRUE(w.is_normalized());
  EXPECT_DOUBLE_EQ(w.l1_norm(), 1.0);
  EXPECT_THROW(RewardWeights::normalized(v({0, 0})), ConfigError);
  EXPECT_THROW(RewardWeights(v({2, 0}), true), ConfigError);
}

TEST(DeriveSeed, DistinctStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
  EXPECT_NE(derive_seed(42, 7), derive_seed(43, 7));
}

TEST(EmpiricalCdf, MedianAndExtremes) {
  const std::vector<double> s{5.0, 1.0, 3.0, 2.0, 4.0};
  const EmpiricalCdf f(s);
  EXPECT_DOUBLE_EQ(f(3.0), 0.5);
  EXPECT_DOUBLE_EQ(f(5.0), 1.0);
  EXPECT_DOUBLE_EQ(f(1.0), 0.0);
  EXPECT_DOUBLE_EQ(f(100.0), 1.0);
  EXPECT_DOUBLE_EQ(f(-100.0), 0.0);
  EXPECT_DOUBLE_EQ(f(2.5), 0.375);
}

TEST(EmpiricalCdf, FittedSampleHasMeanOneHalf) {
  Rng rng(9);
  std::gamma_distribution<double> g(2.0, 1.5);
  std::vector<double> s(999);
  for (auto& x : s) x = std::round(g(rng) * 4.0) / 4.0;  // plenty of ties
  const EmpiricalCdf f(s);
  double mean = 0.0;
  for (double x : s) {
    const double u = f(x);
    EXPECT_GE(u, 0.0);
    EXPECT_LE(u, 1.0);
    mean += u / static_cast<double>(s.size());
  }
  EXPECT_NEAR(mean, 0.5, 0.02);
}

TEST(DatasetIo, RoundTripIsLossless) {
  Rng rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<Trajectory> ts;
  for (int i = 0; i < 5; ++i) {
    std::vector<Vec> s{v({n(rng), n(rng)}), v({n(rng) / 3.0, 1e-300})};
    ts.emplace_back(s, std::vector<int>{1, 0}, std::vector<double>{1.0 / 3.0, 0.7}, v({n(rng), 0.1}), i % 2 == 0);
  }
  const BatchDataset d(ts, {"map2d", 7, "biased(expert)"});
  std::stringstream a;
  write_dataset_jsonl(a, d);
  std::stringstream in(a.str());
  const BatchDataset back = read_dataset_jsonl(in, d.metadata());
  std::stringstream b;
  write_dataset_jsonl(b, back);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(back.content_hash(), d.content_hash());
  EXPECT_EQ(back[0].terminal(), true);
  EXPECT_EQ(back[1].terminal(), false);
}

TEST(DatasetIo, MalformedLineIsConfigError) {
  std::stringstream in("{\"states\": [[1,2]], \"actions\": [0]}\n");
  EXPECT_THROW(read_dataset_jsonl(in, {}), ConfigError);
}

TEST(FormatReal, SeventeenDigits) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(1.0), "1");
  EXPECT_EQ(std::stod(format_real(M_PI)), M_PI);
}
