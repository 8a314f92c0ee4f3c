#include "admissible/core/policy.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <variant>

namespace admissible {

Vec boltzmann_action_probs(const Vec& q_values, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("Boltzmann temperature must be positive and finite");
  }
  if (q_values.size() == 0) throw ConfigError("Boltzmann policy needs at least one action");
  const double top = q_values.maxCoeff();
  if (std::isnan(top) || top == -std::numeric_limits<double>::infinity()) {
    throw NumericalError("Boltzmann policy received no finite action values");
  }
  Vec p(q_values.size());
  for (Eigen::Index a = 0; a < q_values.size(); ++a) {
    if (std::isnan(q_values[a])) throw NumericalError("Boltzmann policy received a NaN action value");
    p[a] = std::exp((q_values[a] - top) / temperature);
  }
  return p / p.sum();
}

int argmax_lowest(const Vec& values) {
  int best = 0;
  for (Eigen::Index a = 1; a < values.size(); ++a) {
    if (values[a] > values[best]) best = static_cast<int>(a);
  }
  return best;
}

struct DeterministicPolicy {
  int n_actions;
  Policy::ActionFn act;
  std::string description;
};

struct GreedyPolicy {
  ActionValuePtr q;
  std::string description;
};

struct BoltzmannPolicy {
  ActionValuePtr q;
  double temperature;
  std::string description;
};

struct MixturePolicy {
  std::vector<Policy> members;
};

struct EpsilonBiasedPolicy {
  Policy base;
  int bias_action;
  double beta;
};

struct UniformPolicy {
  int n_actions;
};

struct Policy::Impl {
  std::variant<DeterministicPolicy, GreedyPolicy, BoltzmannPolicy, MixturePolicy, EpsilonBiasedPolicy, UniformPolicy>
      v;
};

namespace {

Vec one_hot(int n, int a) {
  if (a < 0 || a >= n) {
    std::ostringstream msg;
    msg << "policy chose action " << a << " outside [0, " << n << ")";
    throw ConfigError(msg.str());
  }
  Vec p = Vec::Zero(n);
  p[a] = 1.0;
  return p;
}

}  // namespace

Policy Policy::deterministic(int n_actions, ActionFn act, std::string description) {
  if (n_actions < 1) throw ConfigError("policy needs at least one action");
  return Policy(std::make_shared<Impl>(Impl{DeterministicPolicy{n_actions, std::move(act), std::move(description)}}));
}

Policy Policy::greedy(ActionValuePtr q, std::string description) {
  if (!q) throw ConfigError("greedy policy needs an action-value function");
  return Policy(std::make_shared<Impl>(Impl{GreedyPolicy{std::move(q), std::move(description)}}));
}

Policy Policy::boltzmann(ActionValuePtr q, double temperature, std::string description) {
  if (!q) throw ConfigError("Boltzmann policy needs an action-value function");
  if (!(temperature > 0.0)) throw ConfigError("Boltzmann temperature must be positive");
  return Policy(std::make_shared<Impl>(Impl{BoltzmannPolicy{std::move(q), temperature, std::move(description)}}));
}

Policy Policy::uniform(int n_actions) {
  if (n_actions < 1) throw ConfigError("policy needs at least one action");
  return Policy(std::make_shared<Impl>(Impl{UniformPolicy{n_actions}}));
}

Policy Policy::mixture(std::vector<Policy> members) {
  if (members.empty()) throw ConfigError("mixture policy needs at least one member");
  for (const auto& m : members) {
    if (m.n_actions() != members.front().n_actions()) {
      throw ConfigError("mixture members disagree on the number of actions");
    }
  }
  return Policy(std::make_shared<Impl>(Impl{MixturePolicy{std::move(members)}}));
}

Policy Policy::epsilon_biased(Policy base, int bias_action, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("bias probability must lie in [0, 1]");
  if (bias_action < 0 || bias_action >= base.n_actions()) throw ConfigError("bias action out of range");
  return Policy(std::make_shared<Impl>(Impl{EpsilonBiasedPolicy{std::move(base), bias_action, beta}}));
}

int Policy::n_actions() const {
  return std::visit(
      [](const auto& p) -> int {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DeterministicPolicy> || std::is_same_v<T, UniformPolicy>) {
          return p.n_actions;
        } else if constexpr (std::is_same_v<T, GreedyPolicy> || std::is_same_v<T, BoltzmannPolicy>) {
          return p.q->n_actions();
        } else if constexpr (std::is_same_v<T, MixturePolicy>) {
          return p.members.front().n_actions();
        } else {
          return p.base.n_actions();
        }
      },
      impl_->v);
}

Vec Policy::action_probs(const Vec& state) const {
  return std::visit(
      [&](const auto& p) -> Vec {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DeterministicPolicy>) {
          return one_hot(p.n_actions, p.act(state));
        } else if constexpr (std::is_same_v<T, GreedyPolicy>) {
          const Vec q = p.q->values(state);
          return one_hot(static_cast<int>(q.size()), argmax_lowest(q));
        } else if constexpr (std::is_same_v<T, BoltzmannPolicy>) {
          return boltzmann_action_probs(p.q->values(state), p.temperature);
        } else if constexpr (std::is_same_v<T, UniformPolicy>) {
          return Vec::Constant(p.n_actions, 1.0 / p.n_actions);
        } else if constexpr (std::is_same_v<T, MixturePolicy>) {
          Vec sum = Vec::Zero(p.members.front().n_actions());
          for (const auto& m : p.members) sum += m.action_probs(state);
          return sum / static_cast<double>(p.members.size());
        } else {
          Vec probs = (1.0 - p.beta) * p.base.action_probs(state);
          probs[p.bias_action] += p.beta;
          return probs;
        }
      },
      impl_->v);
}

int sample_action(const Vec& probs, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double cumulative = 0.0;
  int last_positive = 0;
  for (Eigen::Index a = 0; a < probs.size(); ++a) {
    if (probs[a] <= 0.0) continue;
    last_positive = static_cast<int>(a);
    cumulative += probs[a];
    if (u < cumulative) return static_cast<int>(a);
  }
  return last_positive;
}

int Policy::sample(const Vec& state, Rng& rng) const { return sample_action(action_probs(state), rng); }

std::string Policy::describe() const {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        std::ostringstream out;
        if constexpr (std::is_same_v<T, DeterministicPolicy> || std::is_same_v<T, GreedyPolicy>) {
          out << p.description;
        } else if constexpr (std::is_same_v<T, BoltzmannPolicy>) {
          out << p.description << "(temperature=" << p.temperature << ")";
        } else if constexpr (std::is_same_v<T, UniformPolicy>) {
          out << "uniform(" << p.n_actions << ")";
        } else if constexpr (std::is_same_v<T, MixturePolicy>) {
          out << "mixture(" << p.members.size() << " members)";
        } else {
          out << "biased(beta=" << p.beta << ", action=" << p.bias_action << ", base=" << p.base.describe() << ")";
        }
        return out.str();
      },
      impl_->v);
}

}  // namespace admissible
