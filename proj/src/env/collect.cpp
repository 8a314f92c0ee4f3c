#include "admissible/env/collect.hpp"

#include <exception>
#include <thread>

namespace admissible::env {

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(jobs < 1 ? 1 : static_cast<std::size_t>(jobs), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Trajectory rollout(const Environment& env, const Policy& policy, std::size_t horizon, Rng& rng,
                   StartDistribution start) {
  if (policy.n_actions() != env.n_actions()) {
    throw ConfigError("policy has " + std::to_string(policy.n_actions()) + " actions but " + env.name() + " has " +
                      std::to_string(env.n_actions()));
  }
  if (horizon == 0) throw ConfigError("horizon must be positive");
  std::vector<Vec> states;
  std::vector<int> actions;
  std::vector<double> probs;
  Vec s = start == StartDistribution::kExploration ? env.exploration_state(rng) : env.initial_state(rng);
  bool terminal = false;
  for (std::size_t t = 0; t < horizon && !terminal; ++t) {
    const Vec p = policy.action_probs(s);
    const int a = sample_action(p, rng);
    states.push_back(s);
    actions.push_back(a);
    probs.push_back(p[a]);
    EnvStep next = env.step(s, a, rng);
    s = std::move(next.next_state);
    terminal = next.terminal;
  }
  return Trajectory(std::move(states), std::move(actions), std::move(probs), std::move(s), terminal);
}

BatchDataset collect_batch(const Environment& env, const Policy& policy, std::size_t n, std::size_t horizon,
                           std::uint64_t seed, int jobs, StartDistribution start) {
  std::vector<Trajectory> trajectories(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    trajectories[i] = rollout(env, policy, horizon, rng, start);
  });
  return BatchDataset(std::move(trajectories), DatasetMetadata{env.name(), seed, policy.describe()});
}

}  // namespace admissible::env
