#include "admissible/core/types.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

namespace admissible {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Trajectory::Trajectory(std::vector<Vec> states, std::vector<int> actions, std::vector<double> behavior_probs,
                       Vec final_state, bool terminal)
    : states_(std::move(states)),
      actions_(std::move(actions)),
      behavior_probs_(std::move(behavior_probs)),
      final_state_(std::move(final_state)),
      terminal_(terminal) {
  if (states_.size() != actions_.size() || states_.size() != behavior_probs_.size()) {
    std::ostringstream msg;
    msg << "trajectory length mismatch: " << states_.size() << " states, " << actions_.size() << " actions, "
        << behavior_probs_.size() << " behavior probabilities";
    throw ConfigError(msg.str());
  }
  if (states_.empty()) throw ConfigError("trajectory has no steps");
  const auto dim = states_.front().size();
  for (const auto& s : states_) {
    if (s.size() != dim) throw ConfigError("trajectory states have inconsistent dimensions");
  }
  if (final_state_.size() != dim) throw ConfigError("final state dimension differs from trajectory states");
  for (std::size_t t = 0; t < behavior_probs_.size(); ++t) {
    const double p = behavior_probs_[t];
    if (!(p > 0.0 && p <= 1.0)) {
      std::ostringstream msg;
      msg << "behavior probability at step " << t << " is " << p << ", outside (0, 1]";
      throw ConfigError(msg.str());
    }
    if (actions_[t] < 0) throw ConfigError("negative action index in trajectory");
  }
}

BatchDataset::BatchDataset(std::vector<Trajectory> trajectories, DatasetMetadata metadata)
    : trajectories_(std::move(trajectories)), metadata_(std::move(metadata)) {
  if (trajectories_.empty()) throw ConfigError("batch dataset must contain at least one trajectory");
  const auto dim = trajectories_.front().state_dim();
  for (const auto& tr : trajectories_) {
    if (tr.state_dim() != dim) throw ConfigError("trajectories in a dataset must share one state dimension");
  }
}

std::size_t BatchDataset::total_steps() const {
  std::size_t n = 0;
  for (const auto& tr : trajectories_) n += tr.length();
  return n;
}

namespace {

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 0x100000001b3ULL;
    }
  }
  void real(double x) { bytes(&x, sizeof x); }
  void integer(std::int64_t x) { bytes(&x, sizeof x); }
};

}  // namespace

std::uint64_t BatchDataset::content_hash() const {
  Fnv1a f;
  f.integer(static_cast<std::int64_t>(trajectories_.size()));
  for (const auto& tr : trajectories_) {
    f.integer(static_cast<std::int64_t>(tr.length()));
    for (std::size_t t = 0; t < tr.length(); ++t) {
      for (double x : tr.states()[t]) f.real(x);
      f.integer(tr.actions()[t]);
      f.real(tr.behavior_probs()[t]);
    }
    for (double x : tr.final_state()) f.real(x);
    f.integer(tr.terminal() ? 1 : 0);
  }
  return f.h;
}

RewardWeights::RewardWeights(Vec w, bool normalized) : w_(std::move(w)), normalized_(normalized) {
  if (normalized_ && std::abs(w_.lpNorm<1>() - 1.0) > 1e-9) {
    throw ConfigError("reward weights marked normalized must have unit l1 norm");
  }
}

RewardWeights RewardWeights::normalized(const Vec& w) {
  const double n = w.lpNorm<1>();
  if (!(n > 0.0) || !std::isfinite(n)) throw ConfigError("cannot l1-normalize a zero or non-finite weight vector");
  return RewardWeights(w / n, true);
}

}  // namespace admissible
