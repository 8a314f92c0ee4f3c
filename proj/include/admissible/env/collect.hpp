#pragma once

#include "admissible/core/policy.hpp"
#include "admissible/env/environment.hpp"

namespace admissible::env {

enum class StartDistribution { kInitial, kExploration };

/// Rolls out `policy` for n episodes of at most `horizon` steps. Trajectory i
/// uses its own generator seeded with derive_seed(seed, i), so the output is
/// independent of `jobs`.
BatchDataset collect_batch(const Environment& env, const Policy& policy, std::size_t n, std::size_t horizon,
                           std::uint64_t seed, int jobs = 1, StartDistribution start = StartDistribution::kInitial);

Trajectory rollout(const Environment& env, const Policy& policy, std::size_t horizon, Rng& rng,
                   StartDistribution start = StartDistribution::kInitial);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads (static striping).
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace admissible::env
