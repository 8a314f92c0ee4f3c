#include "admissible/cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "admissible/cli/svg.hpp"
#include "admissible/core/dataset_io.hpp"

namespace admissible::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::string join(const Vec& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_real(v[i]);
  return s;
}

RewardWeights weights_for(const Experiment& exp, const std::string& text) {
  const Vec w = parse_weights(text);
  if (w.size() != exp.features()->dim()) {
    throw ConfigError("--w has " + std::to_string(w.size()) + " components; the features have " +
                      std::to_string(exp.features()->dim()));
  }
  return RewardWeights::normalized(w);
}

std::vector<polytope::CachedEvaluation> evaluate_with_cache(const Experiment& exp, std::ostream& log) {
  const fs::path cache_path = exp.config().out_dir / kCacheFile;
  auto cache = polytope::PolicyCache::load_or_empty(cache_path, exp.cache_context());
  const auto grid = exp.grid();
  log << "grid: " << grid.size() << " weight vectors (" << cache.size() << " cached)\n";
  auto evaluations = polytope::evaluate_grid(grid, exp.solver_fn(), &cache, exp.config().jobs);
  cache.save(cache_path);
  return evaluations;
}

std::string sign_pattern(const Vec& w) {
  std::string s;
  for (Eigen::Index i = 0; i < w.size(); ++i) s += w[i] > 0 ? '+' : (w[i] < 0 ? '-' : '0');
  return s;
}

void render_sweep(const fs::path& out_dir, const std::vector<polytope::SweepRecord>& records, std::ostream& log) {
  if (records.empty()) return;
  const Eigen::Index k = records.front().w.size();
  std::ostringstream title;
  title << "epsilon " << format_real(records.front().epsilon) << ", Delta " << format_real(records.front().delta_cap);
  if (k == 2) {
    // One series per verdict class that actually occurs.
    std::map<std::string, Series> by_class;
    const char* order[] = {"accepted", "consistency-lower", "consistency-upper", "evaluability"};
    for (const auto& r : records) {
      const std::string cls = r.accepted ? "accepted" : r.violated;
      auto& s = by_class[cls];
      s.label = cls;
      s.color = verdict_color(cls);
      s.points.emplace_back(r.w[0], r.w[1]);
    }
    std::vector<Series> series;
    for (const char* c : order) {
      if (auto it = by_class.find(c); it != by_class.end()) series.push_back(it->second);
    }
    PlotSpec spec{"Admissible weights: " + title.str(), "w1", "w2", -1.1, 1.1, -1.1, 1.1, true};
    write_text(out_dir / kSweepSvg, render_plot(spec, series));
    log << "wrote " << (out_dir / kSweepSvg).string() << '\n';
  } else if (k == 3) {
    std::vector<std::pair<std::string, std::string>> legend;
    std::map<std::string, std::size_t> index;
    const char* palette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"};
    std::vector<TernaryPoint> points;
    for (const auto& r : records) {
      if (!r.accepted) continue;
      const std::string pattern = sign_pattern(r.w);
      auto [it, fresh] = index.emplace(pattern, legend.size());
      if (fresh) legend.emplace_back("signs " + pattern, palette[legend.size() % 8]);
      points.push_back({r.w, it->second});
    }
    if (legend.empty()) legend.emplace_back("no admitted weights", "#666666");
    write_text(out_dir / kSimplexSvg,
               render_ternary("Admitted |w| (" + title.str() + ")", {"|w1|", "|w2|", "|w3|"}, legend, points));
    log << "wrote " << (out_dir / kSimplexSvg).string() << '\n';
  }
}

void render_curve(const fs::path& out_dir, std::ostream& log) {
  std::ifstream in(out_dir / kCurveCsv);
  if (!in) return;
  std::string line;
  std::getline(in, line);
  Series s{"admitted weights", "#1b9e77", {}, true};
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string a, b;
    if (std::getline(row, a, ',') && std::getline(row, b, ',')) s.points.emplace_back(std::stod(a), std::stod(b));
  }
  PlotSpec spec{"Admissible set size", "threshold (epsilon = Delta)", "admitted grid points"};
  write_text(out_dir / kCurveSvg, render_plot(spec, {s}));
  log << "wrote " << (out_dir / kCurveSvg).string() << '\n';
}

ope::OpeReport report_for(const Experiment& exp, const polytope::PolicyEvaluation& e, const RewardWeights& w) {
  return ope::make_report(e.estimate, e.rho, w, exp.thresholds().bound);
}

}  // namespace

Vec parse_weights(const std::string& text) {
  std::vector<double> values;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t[]");
    const auto last = item.find_last_not_of(" \t[]");
    if (first == std::string::npos) throw ConfigError("empty component in weights '" + text + "'");
    const std::string token = item.substr(first, last - first + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || !std::isfinite(v)) throw ConfigError("cannot parse weight '" + token + "'");
    values.push_back(v);
  }
  if (values.empty()) throw ConfigError("weights must list at least one number");
  return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

ExperimentConfig resolve_config(const CommandOptions& opts) {
  if (opts.config.empty()) throw ConfigError("--config is required");
  if (!fs::exists(opts.config)) throw ConfigError("config file not found: " + opts.config.string());
  const std::uint64_t* seed = opts.seed ? &*opts.seed : nullptr;
  ExperimentConfig cfg = ExperimentConfig::load(opts.config, seed);
  if (opts.jobs) {
    if (*opts.jobs < 1) throw ConfigError("--jobs must be at least 1");
    cfg.jobs = *opts.jobs;
    cfg.fqi.jobs = *opts.jobs;
  }
  if (opts.out) cfg.out_dir = *opts.out;
  if (opts.epsilon) cfg.thresholds.epsilon = *opts.epsilon;
  if (opts.delta_cap) cfg.thresholds.delta_cap = *opts.delta_cap;
  if (!(cfg.thresholds.epsilon >= 0.0) || !(cfg.thresholds.delta_cap >= 0.0)) {
    throw ConfigError("thresholds must be non-negative");
  }
  return cfg;
}

Experiment open_experiment(const ExperimentConfig& cfg) {
  const fs::path path = cfg.out_dir / kDatasetFile;
  if (!fs::exists(path)) throw ConfigError("dataset not found: " + path.string() + " (run 'collect' first)");
  BatchDataset data = load_dataset(path);
  if (data.metadata().env != cfg.env_name) {
    throw ConfigError("dataset " + path.string() + " was collected on '" + data.metadata().env + "', config uses '" +
                      cfg.env_name + "'");
  }
  return Experiment(cfg, std::move(data));
}

void cmd_collect(const ExperimentConfig& cfg, std::ostream& log) {
  const BatchDataset data = collect_dataset(cfg);
  const fs::path path = cfg.out_dir / kDatasetFile;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  save_dataset(path, data);
  std::size_t terminal = 0;
  for (const auto& t : data) terminal += t.terminal() ? 1 : 0;
  log << "collected " << data.size() << " trajectories (" << data.total_steps() << " steps, " << terminal
      << " terminal) -> " << path.string() << '\n';
}

void cmd_train(const ExperimentConfig& cfg, const std::optional<std::string>& w, std::ostream& log) {
  const Experiment exp = open_experiment(cfg);
  if (w) {
    const RewardWeights weights = weights_for(exp, *w);
    const auto q = exp.solve(weights);
    q->save(cfg.out_dir / kQFile);
    log << "trained policy for w = [" << join(weights.values()) << "] -> " << (cfg.out_dir / kQFile).string() << '\n';
    return;
  }
  evaluate_with_cache(exp, log);
  log << "cached grid evaluations -> " << (cfg.out_dir / kCacheFile).string() << '\n';
}

void cmd_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  const Experiment exp = open_experiment(cfg);
  const auto grid = exp.grid();
  const auto evaluations = evaluate_with_cache(exp, log);
  const auto rows = polytope::sweep_verdicts(grid, evaluations, exp.mu_b(), exp.thresholds(), cfg.seed);
  {
    auto out = open_output(cfg.out_dir / kSweepCsv);
    polytope::write_sweep_csv(out, rows);
  }
  std::size_t accepted = 0;
  for (const auto& r : rows) accepted += r.verdict.accepted ? 1 : 0;
  log << "accepted " << accepted << " of " << rows.size() << " -> " << (cfg.out_dir / kSweepCsv).string() << '\n';

  if (exp.features()->dim() == 3) {
    auto out = open_output(cfg.out_dir / kCurveCsv);
    out << "threshold,accepted,total\n";
    for (double t : cfg.curve_thresholds) {
      polytope::Thresholds th = exp.thresholds();
      th.epsilon = t;
      th.delta_cap = t;
      std::size_t n = 0;
      for (const auto& r : polytope::sweep_verdicts(grid, evaluations, exp.mu_b(), th, cfg.seed)) {
        n += r.verdict.accepted ? 1 : 0;
      }
      out << format_real(t) << ',' << n << ',' << rows.size() << '\n';
    }
  }
  cmd_plot(cfg.out_dir, log);
}

void cmd_plot(const fs::path& out_dir, std::ostream& log) {
  std::ifstream in(out_dir / kSweepCsv);
  if (!in) throw ConfigError("no sweep results at " + (out_dir / kSweepCsv).string() + " (run 'sweep' first)");
  render_sweep(out_dir, polytope::read_sweep_csv(in), log);
  render_curve(out_dir, log);
}

void cmd_fpl(const ExperimentConfig& cfg, const std::optional<std::string>& w, std::ostream& log) {
  const Experiment exp = open_experiment(cfg);
  Vec raw;
  if (w) {
    raw = parse_weights(*w);
  } else if (!cfg.fpl_w_init.empty()) {
    raw = Eigen::Map<const Vec>(cfg.fpl_w_init.data(), static_cast<Eigen::Index>(cfg.fpl_w_init.size()));
  } else {
    throw ConfigError("fpl needs initial weights: pass --w or set fpl.w_init");
  }
  if (raw.size() != exp.features()->dim()) {
    throw ConfigError("initial weights have " + std::to_string(raw.size()) + " components; the features have " +
                      std::to_string(exp.features()->dim()));
  }
  const RewardWeights w_init = RewardWeights::normalized(raw);

  fpl::FplConfig fc = cfg.fpl;
  fc.thresholds = exp.thresholds();
  const fpl::FplResult result = fpl::fpl_run(w_init, fc, exp.solver_fn(), exp.mu_b());
  {
    auto out = open_output(cfg.out_dir / kTraceFile);
    fpl::write_trace_jsonl(out, result.trace);
  }

  const auto initial = exp.evaluate(w_init);
  const auto trained = exp.evaluate(result.w_bar);
  polytope::PolicyEvaluation mixture;
  mixture.policy = result.pi_final;
  mixture.estimate = ope::pdis_mu(exp.data(), mixture.policy, *exp.features(), exp.gamma(), exp.pdis_options(),
                                  &mixture.rho);
  const std::pair<const char*, ope::OpeReport> rows[] = {
      {"initial", report_for(exp, initial, w_init)},
      {"final_mixture", report_for(exp, mixture, result.w_bar)},
      {"final_w_bar", report_for(exp, trained, result.w_bar)},
  };
  {
    auto out = open_output(cfg.out_dir / kFplReport);
    out << "label,";
    ope::write_ope_csv_header(out, w_init.dim());
    for (const auto& [label, r] : rows) {
      out << label << ',';
      ope::write_ope_csv_row(out, r);
    }
  }

  const std::size_t n_constraints = result.halfspaces.size();
  std::cout << "w_bar = [" << join(result.w_bar.values()) << "]\n";
  if (n_constraints == 0) {
    log << "zero constraints accumulated: the initial weights were admissible at every iteration\n";
  } else {
    log << n_constraints << " constraints accumulated over " << result.trace.size() << " iterations\n";
  }
  // N_eff is 0 when the batch gives a policy no support at all.
  log << "N_eff initial " << format_real(rows[0].second.n_eff) << ", final " << format_real(rows[1].second.n_eff)
      << " -> " << (cfg.out_dir / kFplReport).string() << '\n';
}

void cmd_eval(const ExperimentConfig& cfg, const std::optional<std::string>& w, std::ostream& log) {
  if (!w) throw ConfigError("eval needs --w");
  const Experiment exp = open_experiment(cfg);
  const RewardWeights weights = weights_for(exp, *w);
  const auto e = exp.evaluate(weights);
  const auto r = report_for(exp, e, weights);
  auto out = open_output(cfg.out_dir / kEvalCsv);
  ope::write_ope_csv_header(out, weights.dim());
  ope::write_ope_csv_row(out, r);
  log << "V_hat " << format_real(r.v_hat) << ", V_lb " << format_real(r.v_lb) << ", N_eff " << format_real(r.n_eff)
      << " -> " << (cfg.out_dir / kEvalCsv).string() << '\n';
}

int run_command(const std::string& name, const CommandOptions& opts, std::ostream& log, std::ostream& err) {
  try {
    if (name == "plot" && opts.config.empty()) {
      cmd_plot(opts.out.value_or("out"), log);
      return 0;
    }
    const ExperimentConfig cfg = resolve_config(opts);
    if (name == "collect") cmd_collect(cfg, log);
    else if (name == "train") cmd_train(cfg, opts.w, log);
    else if (name == "sweep") cmd_sweep(cfg, log);
    else if (name == "fpl") cmd_fpl(cfg, opts.w, log);
    else if (name == "eval") cmd_eval(cfg, opts.w, log);
    else if (name == "plot") cmd_plot(cfg.out_dir, log);
    else throw ConfigError("unknown command '" + name + "'");
    return 0;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 4;
  } catch (const fs::filesystem_error& e) {
    err << "file error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace admissible::cli
