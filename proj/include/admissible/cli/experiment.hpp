#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "admissible/cli/config_file.hpp"
#include "admissible/env/acrobot.hpp"
#include "admissible/env/hiv.hpp"
#include "admissible/env/map2d.hpp"
#include "admissible/env/mountain_car.hpp"
#include "admissible/fpl/fpl.hpp"
#include "admissible/polytope/sweep.hpp"
#include "admissible/solver/fqi.hpp"

namespace admissible::cli {

/// How the logging policy is built: an expert Q-function trained by FQI on
/// exploratory data (uniform actions from exploration starts), followed with
/// Boltzmann exploration.
struct ExpertConfig {
  std::size_t trajectories = 500;
  std::size_t horizon = 100;
  int iterations = 100;
  double gamma = 0.95;
  /// Boltzmann temperature of the logging policy around the expert Q; 0 is greedy.
  double temperature = 1.0;
  solver::ExtraTreesParams trees;
};

struct ExperimentConfig {
  std::string env_name = "map2d";
  env::Map2DConfig map2d;
  env::MountainCarConfig mountain_car;
  env::AcrobotConfig acrobot;
  env::HIVConfig hiv;
  /// map2d: probability of stepping left instead of following the expert.
  double beta = 0.1;

  std::size_t batch_size = 1000;
  std::size_t horizon = 30;
  ExpertConfig expert;

  solver::FqiParams fqi;
  /// Temperature of the Boltzmann policies derived from solved Q-functions;
  /// 0 means greedy.
  double policy_temperature = 0.0;

  /// 0 selects the data-derived default ceiling.
  double value_ceiling = 0.0;
  double rho_clip = 0.0;
  polytope::Thresholds thresholds;
  double grid_step = 0.5;
  /// epsilon = Delta values for the admissible-set-size curve.
  std::vector<double> curve_thresholds{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};

  fpl::FplConfig fpl;
  std::vector<double> fpl_w_init;

  std::uint64_t seed = 0;
  bool seed_set = false;
  std::filesystem::path out_dir = "out";
  int jobs = 1;

  /// Reads every section; unknown keys are configuration errors. The seed is
  /// mandatory unless `seed_override` supplies it.
  static ExperimentConfig from_file(const ConfigFile& file, const std::uint64_t* seed_override = nullptr);
  static ExperimentConfig load(const std::filesystem::path& path, const std::uint64_t* seed_override = nullptr);

  Eigen::Index feature_dim() const;
  /// Stable description of everything the trained policies depend on.
  std::string solver_signature() const;
};

env::EnvironmentPtr make_environment(const ExperimentConfig& cfg);

/// Expert action values over raw states.
ActionValuePtr train_expert(const ExperimentConfig& cfg, const env::EnvironmentPtr& environment);

/// Expert with Boltzmann exploration (plus the left bias on map2d).
Policy make_behavior_policy(const ExperimentConfig& cfg, const env::EnvironmentPtr& environment);

BatchDataset collect_dataset(const ExperimentConfig& cfg);

/// Feature map of the configured environment, fitted on `data` where needed.
FeatureMapPtr make_features(const ExperimentConfig& cfg, const BatchDataset& data);

/// A dataset plus everything derived from it that the commands share.
class Experiment {
 public:
  Experiment(ExperimentConfig cfg, BatchDataset data);
  ~Experiment();

  const ExperimentConfig& config() const { return cfg_; }
  const BatchDataset& data() const { return data_; }
  const env::EnvironmentPtr& environment() const { return env_; }
  const FeatureMapPtr& features() const { return phi_; }
  const Vec& mu_b() const { return mu_b_; }
  /// Thresholds with the value ceiling resolved.
  const polytope::Thresholds& thresholds() const { return thresholds_; }
  double gamma() const { return cfg_.fqi.gamma; }

  /// Train the policy for w and estimate its feature expectations by PDIS.
  polytope::PolicyEvaluation evaluate(const RewardWeights& w) const;
  solver::QFunctionPtr solve(const RewardWeights& w) const;
  Policy policy_from(const solver::QFunctionPtr& q) const;
  polytope::SolverFn solver_fn() const;
  std::string cache_context() const;
  std::vector<RewardWeights> grid() const;
  ope::PdisOptions pdis_options() const;

 private:
  const solver::FqiProblem& problem() const;

  ExperimentConfig cfg_;
  BatchDataset data_;
  env::EnvironmentPtr env_;
  FeatureMapPtr phi_;
  Vec mu_b_;
  polytope::Thresholds thresholds_;
  mutable std::once_flag problem_once_;
  mutable std::unique_ptr<solver::FqiProblem> problem_;
};

}  // namespace admissible::cli
