#include "admissible/cli/experiment.hpp"

#include <sstream>

#include "admissible/core/dataset_io.hpp"
#include "admissible/core/grid.hpp"
#include "admissible/env/collect.hpp"

namespace admissible::cli {

namespace {

// Stream ids for derive_seed(seed, .).
constexpr std::uint64_t kBatchStream = 1;
constexpr std::uint64_t kSolverStream = 2;
constexpr std::uint64_t kExpertTreeStream = 3;
constexpr std::uint64_t kExplorationStream = 4;
constexpr std::uint64_t kFplStream = 5;

std::size_t get_size(const ConfigFile& f, const std::string& key, std::size_t fallback) {
  return static_cast<std::size_t>(f.get_u64(key, fallback));
}

void read_trees(const ConfigFile& f, const std::string& section, solver::ExtraTreesParams& p) {
  p.n_trees = f.get_int(section + ".n_trees", p.n_trees);
  p.min_leaf = f.get_int(section + ".min_leaf", p.min_leaf);
  p.k_splits = f.get_int(section + ".k_splits", p.k_splits);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const ConfigFile& f, const std::uint64_t* seed_override) {
  ExperimentConfig c;
  c.seed_set = f.has("seed") || seed_override;
  c.seed = f.get_u64("seed", 0);
  if (seed_override) c.seed = *seed_override;
  if (!c.seed_set) throw ConfigError(f.origin() + ": 'seed' is mandatory (or pass --seed)");
  c.jobs = f.get_int("jobs", c.jobs);

  c.env_name = f.get_string("env.name", c.env_name);
  if (c.env_name == "map2d") {
    auto& m = c.map2d;
    m.x_min = f.get_double("env.x_min", m.x_min);
    m.x_max = f.get_double("env.x_max", m.x_max);
    m.y_min = f.get_double("env.y_min", m.y_min);
    m.y_max = f.get_double("env.y_max", m.y_max);
    m.step_mean = f.get_double("env.step_mean", m.step_mean);
    m.step_std = f.get_double("env.step_std", m.step_std);
    m.start_low = f.get_double("env.start_low", m.start_low);
    m.start_high = f.get_double("env.start_high", m.start_high);
    c.beta = f.get_double("env.beta", c.beta);
    m.validate();
    if (!(c.beta >= 0.0 && c.beta <= 1.0)) throw ConfigError("env.beta must lie in [0, 1]");
  } else if (c.env_name == "mountain_car") {
    auto& m = c.mountain_car;
    m.start_low = f.get_double("env.start_low", m.start_low);
    m.start_high = f.get_double("env.start_high", m.start_high);
    m.absorbing_goal = f.get_bool("env.absorbing_goal", m.absorbing_goal);
    m.validate();
  } else if (c.env_name == "acrobot") {
    auto& a = c.acrobot;
    a.dt = f.get_double("env.dt", a.dt);
    a.start_noise = f.get_double("env.start_noise", a.start_noise);
    a.absorbing_goal = f.get_bool("env.absorbing_goal", a.absorbing_goal);
    a.validate();
  } else if (c.env_name == "hiv") {
    auto& h = c.hiv;
    h.integration_dt = f.get_double("env.integration_dt", h.integration_dt);
    h.days_per_step = f.get_double("env.days_per_step", h.days_per_step);
    h.init_noise = f.get_double("env.init_noise", h.init_noise);
    h.c0 = f.get_double("env.c0", h.c0);
    h.c1 = f.get_double("env.c1", h.c1);
    h.c2 = f.get_double("env.c2", h.c2);
    h.validate();
  } else {
    throw ConfigError("unknown env.name '" + c.env_name + "' (expected map2d, mountain_car, acrobot or hiv)");
  }

  c.batch_size = get_size(f, "batch.size", c.batch_size);
  c.horizon = get_size(f, "batch.horizon", c.horizon);
  if (c.batch_size < 2) throw ConfigError("batch.size must be at least 2");
  if (c.horizon < 1) throw ConfigError("batch.horizon must be positive");

  auto& e = c.expert;
  e.trajectories = get_size(f, "expert.trajectories", e.trajectories);
  e.horizon = get_size(f, "expert.horizon", e.horizon);
  e.iterations = f.get_int("expert.iterations", e.iterations);
  e.gamma = f.get_double("expert.gamma", e.gamma);
  e.temperature = f.get_double("expert.temperature", e.temperature);
  read_trees(f, "expert", e.trees);
  e.trees.seed = derive_seed(c.seed, kExpertTreeStream);
  e.trees.validate();
  if (!(e.temperature >= 0.0)) throw ConfigError("expert.temperature must be non-negative (0 = greedy)");

  c.fqi.gamma = f.get_double("solver.gamma", c.fqi.gamma);
  c.fqi.iterations = f.get_int("solver.iterations", c.fqi.iterations);
  c.fqi.regressor.kind = f.get_string("solver.regressor", c.fqi.regressor.kind);
  c.fqi.regressor.ridge = f.get_double("solver.ridge", c.fqi.regressor.ridge);
  c.fqi.regressor.trees.n_trees = 50;
  read_trees(f, "solver", c.fqi.regressor.trees);
  c.fqi.regressor.trees.seed = derive_seed(c.seed, kSolverStream);
  c.fqi.jobs = c.jobs;
  c.fqi.validate();
  check_gamma(c.fqi.gamma);
  c.policy_temperature = f.get_double("solver.policy_temperature", c.policy_temperature);
  if (!(c.policy_temperature >= 0.0)) throw ConfigError("solver.policy_temperature must be non-negative");

  c.thresholds.bound.delta = f.get_double("ope.delta", c.thresholds.bound.delta);
  c.value_ceiling = f.get_double("ope.value_ceiling", c.value_ceiling);
  c.rho_clip = f.get_double("ope.rho_clip", c.rho_clip);
  if (!(c.value_ceiling >= 0.0)) throw ConfigError("ope.value_ceiling must be non-negative (0 = automatic)");
  if (!(c.rho_clip >= 0.0)) throw ConfigError("ope.rho_clip must be non-negative (0 = off)");

  auto& t = c.thresholds;
  t.epsilon = f.get_double("polytope.epsilon", t.epsilon);
  t.delta_cap = f.get_double("polytope.delta_cap", t.delta_cap);
  t.enable_consistency = f.get_bool("polytope.enable_consistency", t.enable_consistency);
  t.enable_evaluability = f.get_bool("polytope.enable_evaluability", t.enable_evaluability);
  c.grid_step = f.get_double("polytope.grid_step", c.grid_step);
  c.curve_thresholds = f.get_array("polytope.curve_thresholds", c.curve_thresholds);
  if (!(t.epsilon >= 0.0 && t.delta_cap >= 0.0)) throw ConfigError("thresholds must be non-negative");
  if (!(t.bound.delta > 0.0 && t.bound.delta < 1.0)) throw ConfigError("ope.delta must lie in (0, 1)");

  auto& p = c.fpl;
  p.iterations = f.get_int("fpl.iterations", p.iterations);
  p.perturbation = f.get_string("fpl.perturbation", p.perturbation);
  p.scale = f.get_double("fpl.scale", p.scale);
  p.norm_cap = f.get_double("fpl.norm_cap", p.norm_cap);
  p.projection.tolerance = f.get_double("fpl.tolerance", p.projection.tolerance);
  p.seed = derive_seed(c.seed, kFplStream);
  c.fpl_w_init = f.get_array("fpl.w_init", c.fpl_w_init);

  c.out_dir = f.get_string("output.dir", c.out_dir.string());

  if (const auto unused = f.unused_keys(); !unused.empty()) {
    std::string list;
    for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError(f.origin() + ": unknown keys: " + list);
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path, const std::uint64_t* seed_override) {
  return from_file(ConfigFile::load(path), seed_override);
}

Eigen::Index ExperimentConfig::feature_dim() const { return env_name == "map2d" ? 2 : 3; }

std::string ExperimentConfig::solver_signature() const {
  std::ostringstream s;
  const auto& r = fqi.regressor;
  s << "env=" << env_name << ";gamma=" << format_real(fqi.gamma) << ";iterations=" << fqi.iterations
    << ";regressor=" << r.kind << ";n_trees=" << r.trees.n_trees << ";min_leaf=" << r.trees.min_leaf
    << ";k_splits=" << r.trees.k_splits << ";tree_seed=" << r.trees.seed << ";ridge=" << format_real(r.ridge)
    << ";policy_temperature=" << format_real(policy_temperature) << ";rho_clip=" << format_real(rho_clip);
  return s.str();
}

env::EnvironmentPtr make_environment(const ExperimentConfig& cfg) {
  if (cfg.env_name == "map2d") return std::make_shared<env::Map2D>(cfg.map2d);
  if (cfg.env_name == "mountain_car") return std::make_shared<env::MountainCar>(cfg.mountain_car);
  if (cfg.env_name == "acrobot") return std::make_shared<env::Acrobot>(cfg.acrobot);
  if (cfg.env_name == "hiv") return std::make_shared<env::HIV>(cfg.hiv);
  throw ConfigError("unknown environment '" + cfg.env_name + "'");
}

namespace {

/// Reward the expert is trained on, for transition (s, a, s').
double expert_reward(const ExperimentConfig& cfg, const Vec& s, int a, const Vec& next) {
  if (cfg.env_name == "map2d") return env::map2d_true_reward(s);
  if (cfg.env_name == "hiv") return env::hiv_true_reward(s, (a & 1) != 0, (a & 2) != 0);
  // Goal tasks: -1 per step until the goal is reached.
  const double reached = cfg.env_name == "mountain_car" ? next[2] : next[4];
  const double already = cfg.env_name == "mountain_car" ? s[2] : s[4];
  return already > 0.5 ? 0.0 : (reached > 0.5 ? 0.0 : -1.0);
}

}  // namespace

ActionValuePtr train_expert(const ExperimentConfig& cfg, const env::EnvironmentPtr& environment) {
  const auto& e = cfg.expert;
  const BatchDataset explore =
      env::collect_batch(*environment, Policy::uniform(environment->n_actions()), e.trajectories, e.horizon,
                         derive_seed(cfg.seed, kExplorationStream), cfg.jobs, env::StartDistribution::kExploration);
  solver::FqiParams params;
  params.gamma = e.gamma;
  params.iterations = e.iterations;
  params.regressor.kind = "extra_trees";
  params.regressor.trees = e.trees;
  params.jobs = cfg.jobs;
  const auto encoder = [environment](const Vec& s) { return environment->encode(s); };
  const solver::FqiProblem problem(explore, std::make_shared<IdentityFeatures>(environment->state_dim()),
                                   environment->n_actions(), params, encoder);
  Vec rewards(static_cast<Eigen::Index>(problem.n_transitions()));
  Eigen::Index i = 0;
  for (const auto& tr : explore) {
    for (std::size_t t = 0; t < tr.length(); ++t) {
      rewards[i++] = expert_reward(cfg, tr.states()[t], tr.actions()[t], tr.next_state(t));
    }
  }
  return std::make_shared<env::EncodedActionValue>(problem.solve_rewards(rewards), environment);
}

Policy make_behavior_policy(const ExperimentConfig& cfg, const env::EnvironmentPtr& environment) {
  auto q = train_expert(cfg, environment);
  Policy expert = cfg.expert.temperature > 0.0 ? Policy::boltzmann(std::move(q), cfg.expert.temperature, "expert")
                                               : Policy::greedy(std::move(q), "expert-greedy");
  if (cfg.env_name == "map2d") return Policy::epsilon_biased(std::move(expert), env::kLeft, cfg.beta);
  return expert;
}

BatchDataset collect_dataset(const ExperimentConfig& cfg) {
  const auto environment = make_environment(cfg);
  const Policy behavior = make_behavior_policy(cfg, environment);
  return env::collect_batch(*environment, behavior, cfg.batch_size, cfg.horizon, derive_seed(cfg.seed, kBatchStream),
                            cfg.jobs);
}

FeatureMapPtr make_features(const ExperimentConfig& cfg, const BatchDataset& data) {
  if (cfg.env_name == "map2d") return std::make_shared<IdentityFeatures>(2);
  if (cfg.env_name == "mountain_car") return std::make_shared<env::MountainCarFeatures>(env::MountainCarFeatures::fit(data));
  if (cfg.env_name == "acrobot") return std::make_shared<env::AcrobotFeatures>(env::AcrobotFeatures::fit(data));
  if (cfg.env_name == "hiv") return std::make_shared<env::HIVFeatures>(cfg.hiv);
  throw ConfigError("unknown environment '" + cfg.env_name + "'");
}

Experiment::Experiment(ExperimentConfig cfg, BatchDataset data)
    : cfg_(std::move(cfg)), data_(std::move(data)), env_(make_environment(cfg_)) {
  if (data_.state_dim() != env_->state_dim()) {
    throw ConfigError("dataset states have dimension " + std::to_string(data_.state_dim()) + " but " + cfg_.env_name +
                      " expects " + std::to_string(env_->state_dim()));
  }
  phi_ = make_features(cfg_, data_);
  mu_b_ = behavior_feature_expectations(data_, *phi_, gamma());
  thresholds_ = cfg_.thresholds;
  thresholds_.bound.b =
      cfg_.value_ceiling > 0.0 ? cfg_.value_ceiling : ope::default_value_ceiling(data_, *phi_, gamma());
  thresholds_.validate();
}

Experiment::~Experiment() = default;

const solver::FqiProblem& Experiment::problem() const {
  std::call_once(problem_once_, [this] {
    auto environment = env_;
    problem_ = std::make_unique<solver::FqiProblem>(data_, phi_, env_->n_actions(), cfg_.fqi,
                                                    [environment](const Vec& s) { return environment->encode(s); });
  });
  return *problem_;
}

solver::QFunctionPtr Experiment::solve(const RewardWeights& w) const { return problem().solve(w); }

Policy Experiment::policy_from(const solver::QFunctionPtr& q) const {
  auto lifted = std::make_shared<env::EncodedActionValue>(q, env_);
  if (cfg_.policy_temperature > 0.0) return Policy::boltzmann(std::move(lifted), cfg_.policy_temperature, "fqi");
  return Policy::greedy(std::move(lifted), "fqi-greedy");
}

ope::PdisOptions Experiment::pdis_options() const {
  ope::PdisOptions o;
  o.rho_clip = cfg_.rho_clip;
  o.jobs = 1;
  return o;
}

polytope::PolicyEvaluation Experiment::evaluate(const RewardWeights& w) const {
  polytope::PolicyEvaluation out;
  out.policy = policy_from(solve(w));
  out.estimate = ope::pdis_mu(data_, out.policy, *phi_, gamma(), pdis_options(), &out.rho);
  return out;
}

polytope::SolverFn Experiment::solver_fn() const {
  return [this](const RewardWeights& w) { return evaluate(w); };
}

std::string Experiment::cache_context() const {
  std::ostringstream s;
  s << "dataset=" << data_.content_hash() << ";" << cfg_.solver_signature();
  return s.str();
}

std::vector<RewardWeights> Experiment::grid() const { return l1_ball_grid(static_cast<int>(phi_->dim()), cfg_.grid_step); }

}  // namespace admissible::cli
