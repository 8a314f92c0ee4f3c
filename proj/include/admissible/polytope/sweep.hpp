#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "admissible/polytope/oracle.hpp"

namespace admissible::polytope {

/// Threshold-independent result of training and evaluating the policy for one w.
struct CachedEvaluation {
  Vec w;
  ope::FeatureExpectationEstimate estimate;
  Vec rho;
};

/// Evaluations keyed by w, valid for one (dataset, solver settings) context.
class PolicyCache {
 public:
  explicit PolicyCache(std::string context) : context_(std::move(context)) {}

  const std::string& context() const { return context_; }
  const CachedEvaluation* find(const Vec& w) const;
  void insert(CachedEvaluation e);
  std::size_t size() const { return entries_.size(); }

  void save(const std::filesystem::path& path) const;
  /// Loads `path` if it exists and was written for the same context;
  /// otherwise returns an empty cache for `context`.
  static PolicyCache load_or_empty(const std::filesystem::path& path, const std::string& context);

 private:
  std::string context_;
  std::map<std::string, CachedEvaluation> entries_;
};

struct SweepRow {
  RewardWeights w;
  OracleVerdict verdict;
  double epsilon = 0.0;
  double delta_cap = 0.0;
  std::uint64_t seed = 0;
};

/// Trains (or fetches from `cache`) the policy of every grid point.
std::vector<CachedEvaluation> evaluate_grid(const std::vector<RewardWeights>& grid, const SolverFn& solver,
                                            PolicyCache* cache = nullptr, int jobs = 1);

/// Verdicts for fixed evaluations; cheap, so threshold sweeps call it repeatedly.
std::vector<SweepRow> sweep_verdicts(const std::vector<RewardWeights>& grid,
                                     const std::vector<CachedEvaluation>& evaluations, const Vec& mu_b,
                                     const Thresholds& thresholds, std::uint64_t seed = 0);

std::vector<SweepRow> sweep_admissible(const std::vector<RewardWeights>& grid, const SolverFn& solver,
                                       const Vec& mu_b, const Thresholds& thresholds, std::uint64_t seed = 0,
                                       PolicyCache* cache = nullptr, int jobs = 1);

/// Columns: w1..wk, accepted, violated, w_mu, w_mu_b, w_mu_lb,
/// negative_behavior_value, epsilon, delta_cap, seed.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Parsed sweep CSV row (what `plot` needs).
struct SweepRecord {
  Vec w;
  bool accepted = false;
  std::string violated;
  double w_mu = 0.0, w_mu_b = 0.0, w_mu_lb = 0.0;
  double epsilon = 0.0, delta_cap = 0.0;
};

std::vector<SweepRecord> read_sweep_csv(std::istream& in);

}  // namespace admissible::polytope
