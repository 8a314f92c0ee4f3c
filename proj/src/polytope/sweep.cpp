#include "admissible/polytope/sweep.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "admissible/core/dataset_io.hpp"
#include "admissible/env/collect.hpp"

namespace admissible::polytope {

namespace {

std::string key_of(const Vec& w) {
  std::string k;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (i) k += ',';
    k += format_real(w[i]);
  }
  return k;
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

const CachedEvaluation* PolicyCache::find(const Vec& w) const {
  auto it = entries_.find(key_of(w));
  return it == entries_.end() ? nullptr : &it->second;
}

void PolicyCache::insert(CachedEvaluation e) {
  std::string k = key_of(e.w);
  entries_.insert_or_assign(std::move(k), std::move(e));
}

void PolicyCache::save(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["context"] = context_;
  j["entries"] = nlohmann::json::array();
  for (const auto& [key, e] : entries_) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index n = 0; n < e.estimate.per_trajectory.rows(); ++n) {
      rows.push_back(to_std(e.estimate.per_trajectory.row(n).transpose()));
    }
    j["entries"].push_back({{"w", to_std(e.w)}, {"mu_hat", to_std(e.estimate.mean)}, {"per_trajectory", rows},
                            {"rho", to_std(e.rho)}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write policy cache " + path.string());
  out << j.dump() << "\n";
}

PolicyCache PolicyCache::load_or_empty(const std::filesystem::path& path, const std::string& context) {
  PolicyCache cache(context);
  std::ifstream in(path, std::ios::binary);
  if (!in) return cache;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("context").get<std::string>() != context) return cache;
    for (const auto& je : j.at("entries")) {
      CachedEvaluation e;
      e.w = to_vec(je.at("w").get<std::vector<double>>());
      e.estimate.mean = to_vec(je.at("mu_hat").get<std::vector<double>>());
      const auto& rows = je.at("per_trajectory");
      e.estimate.per_trajectory.resize(static_cast<Eigen::Index>(rows.size()), e.estimate.mean.size());
      for (std::size_t n = 0; n < rows.size(); ++n) {
        e.estimate.per_trajectory.row(static_cast<Eigen::Index>(n)) = to_vec(rows[n].get<std::vector<double>>()).transpose();
      }
      e.estimate.n_trajectories = rows.size();
      e.rho = to_vec(je.at("rho").get<std::vector<double>>());
      cache.insert(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed policy cache " + path.string() + ": " + e.what());
  }
  return cache;
}

std::vector<CachedEvaluation> evaluate_grid(const std::vector<RewardWeights>& grid, const SolverFn& solver,
                                            PolicyCache* cache, int jobs) {
  std::vector<CachedEvaluation> out(grid.size());
  std::vector<char> missing(grid.size(), 1);
  if (cache) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (const auto* hit = cache->find(grid[i].values())) {
        out[i] = *hit;
        missing[i] = 0;
      }
    }
  }
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (missing[i]) todo.push_back(i);
  }
  env::parallel_for(todo.size(), jobs, [&](std::size_t j) {
    const std::size_t i = todo[j];
    PolicyEvaluation e = solver(grid[i]);
    out[i] = {grid[i].values(), std::move(e.estimate), std::move(e.rho)};
  });
  if (cache) {
    for (std::size_t i : todo) cache->insert(out[i]);
  }
  return out;
}

std::vector<SweepRow> sweep_verdicts(const std::vector<RewardWeights>& grid,
                                     const std::vector<CachedEvaluation>& evaluations, const Vec& mu_b,
                                     const Thresholds& thresholds, std::uint64_t seed) {
  if (grid.size() != evaluations.size()) throw ConfigError("one evaluation per grid point is required");
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rows.push_back({grid[i], judge(grid[i], evaluations[i].estimate, mu_b, thresholds), thresholds.epsilon,
                    thresholds.delta_cap, seed});
  }
  return rows;
}

std::vector<SweepRow> sweep_admissible(const std::vector<RewardWeights>& grid, const SolverFn& solver,
                                       const Vec& mu_b, const Thresholds& thresholds, std::uint64_t seed,
                                       PolicyCache* cache, int jobs) {
  return sweep_verdicts(grid, evaluate_grid(grid, solver, cache, jobs), mu_b, thresholds, seed);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  const Eigen::Index k = rows.empty() ? 0 : rows.front().w.dim();
  for (Eigen::Index i = 1; i <= k; ++i) out << "w" << i << ",";
  out << "accepted,violated,w_mu,w_mu_b,w_mu_lb,negative_behavior_value,epsilon,delta_cap,seed\n";
  for (const auto& r : rows) {
    for (Eigen::Index i = 0; i < k; ++i) out << format_real(r.w[i]) << ",";
    const auto& d = r.verdict.diagnostics;
    out << (r.verdict.accepted ? 1 : 0) << "," << to_string(r.verdict.violated) << "," << format_real(d.w_mu) << ","
        << format_real(d.w_mu_b) << "," << format_real(d.w_mu_lb) << "," << (d.negative_behavior_value ? 1 : 0)
        << "," << format_real(r.epsilon) << "," << format_real(r.delta_cap) << "," << r.seed << "\n";
  }
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty sweep CSV");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  std::size_t k = 0;
  while (k < header.size() && header[k] == "w" + std::to_string(k + 1)) ++k;
  if (k == 0 || header.size() != k + 9) throw ConfigError("unrecognized sweep CSV header");
  std::vector<SweepRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size()) throw ConfigError("wrong column count on sweep CSV line " + std::to_string(line_no));
    try {
      SweepRecord r;
      r.w.resize(static_cast<Eigen::Index>(k));
      for (std::size_t i = 0; i < k; ++i) r.w[static_cast<Eigen::Index>(i)] = std::stod(cells[i]);
      r.accepted = cells[k] == "1";
      r.violated = cells[k + 1];
      r.w_mu = std::stod(cells[k + 2]);
      r.w_mu_b = std::stod(cells[k + 3]);
      r.w_mu_lb = std::stod(cells[k + 4]);
      r.epsilon = std::stod(cells[k + 6]);
      r.delta_cap = std::stod(cells[k + 7]);
      out.push_back(std::move(r));
    } catch (const std::exception&) {
      throw ConfigError("malformed number on sweep CSV line " + std::to_string(line_no));
    }
  }
  return out;
}

}  // namespace admissible::polytope
