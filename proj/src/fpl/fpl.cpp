#include "admissible/fpl/fpl.hpp"

#include <cmath>

#include "admissible/core/dataset_io.hpp"

namespace admissible::fpl {

void FplConfig::validate() const {
  if (iterations < 1) throw ConfigError("FPL needs at least one iteration");
  if (perturbation != "literal" && perturbation != "damped") {
    throw ConfigError("perturbation must be 'literal' or 'damped'");
  }
  if (!(scale >= 0.0)) throw ConfigError("perturbation scale must be positive (or 0 for the preset)");
  thresholds.validate();
}

double FplConfig::perturbation_scale(Eigen::Index k) const {
  if (scale > 0.0) return scale;
  const double delta = 1.0 / (static_cast<double>(k) * std::sqrt(static_cast<double>(iterations)));
  return perturbation == "damped" ? delta : 1.0 / delta;
}

namespace {

Vec uniform_vector(Eigen::Index k, double scale, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, scale);
  Vec v(k);
  for (Eigen::Index i = 0; i < k; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

FplResult fpl_run(const RewardWeights& w_init, const FplConfig& cfg, const polytope::SolverFn& solver,
                  const Vec& mu_b) {
  cfg.validate();
  if (std::abs(w_init.l1_norm() - 1.0) > 1e-9) throw ConfigError("w_init must have unit l1 norm");
  const Eigen::Index k = w_init.dim();
  if (mu_b.size() != k) throw ConfigError("behaviour feature expectations do not match w_init");
  const double scale = cfg.perturbation_scale(k);
  Rng rng(cfg.seed);

  FplResult result;
  std::vector<Policy> policies;
  Vec running = w_init.values();  // sum of w_0 .. w_{t-1}
  Vec current = w_init.values();  // w_{t-1}
  Vec w_sum = Vec::Zero(k);
  for (int t = 1; t <= cfg.iterations; ++t) {
    FplIteration it;
    it.t = t;
    it.p = uniform_vector(k, scale, rng);
    it.q = uniform_vector(k, scale, rng);
    it.leader = running + static_cast<double>(t) * it.p;
    const RewardWeights leader = RewardWeights::normalized(it.leader);
    it.solver_weights = leader.values();

    polytope::PolicyEvaluation eval = solver(leader);
    it.policy_id = "pi_" + std::to_string(t);
    it.mu = eval.estimate.mean;
    it.mu_perturbed = it.mu + it.q;

    // Constraints at the current point, with mu and its lower bound shifted by q_t.
    const RewardWeights here(current, false);
    const Vec mu_lb = ope::mu_lower_bound(eval.estimate, here, cfg.thresholds.bound) + it.q;
    for (auto& [kind, h] : polytope::violated_constraints(here, it.mu_perturbed, mu_lb, mu_b, cfg.thresholds)) {
      it.new_constraints.push_back(polytope::to_string(kind));
      result.halfspaces.push_back(std::move(h));
    }
    it.n_halfspaces = result.halfspaces.size();

    const ProjectionResult proj =
        nearest_admissible_point(w_init.values(), result.halfspaces, cfg.norm_cap, cfg.projection);
    it.w = proj.point;
    it.projection_cycles = proj.cycles;

    policies.push_back(std::move(eval.policy));
    // The leader sums unit-norm iterates; the raw projection stays in the trace.
    const double norm = it.w.lpNorm<1>();
    if (norm > 1e-12) running += it.w / norm;
    current = it.w;
    w_sum += it.w;
    result.trace.push_back(std::move(it));
  }
  const Vec w_bar = w_sum / static_cast<double>(cfg.iterations);
  if (w_bar.lpNorm<1>() < 1e-12) {
    throw InfeasibleError("FPL average weights collapsed to zero: the accumulated constraints admit only w = 0");
  }
  result.w_bar = RewardWeights::normalized(w_bar);
  result.pi_final = Policy::mixture(std::move(policies));
  return result;
}

namespace {

void write_array(std::ostream& out, const Vec& v) {
  out << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) out << (i ? "," : "") << format_real(v[i]);
  out << ']';
}

}  // namespace

void write_trace_jsonl(std::ostream& out, const std::vector<FplIteration>& trace) {
  for (const auto& it : trace) {
    out << "{\"t\":" << it.t << ",\"leader\":";
    write_array(out, it.leader);
    out << ",\"solver_weights\":";
    write_array(out, it.solver_weights);
    out << ",\"p\":";
    write_array(out, it.p);
    out << ",\"q\":";
    write_array(out, it.q);
    out << ",\"mu\":";
    write_array(out, it.mu);
    out << ",\"mu_perturbed\":";
    write_array(out, it.mu_perturbed);
    out << ",\"policy\":\"" << it.policy_id << "\",\"new_constraints\":[";
    for (std::size_t i = 0; i < it.new_constraints.size(); ++i) {
      out << (i ? "," : "") << '"' << it.new_constraints[i] << '"';
    }
    out << "],\"n_halfspaces\":" << it.n_halfspaces << ",\"w\":";
    write_array(out, it.w);
    out << ",\"projection_cycles\":" << it.projection_cycles << "}\n";
  }
}

}  // namespace admissible::fpl
