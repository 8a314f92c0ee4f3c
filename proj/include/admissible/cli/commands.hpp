#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "admissible/cli/experiment.hpp"

namespace admissible::cli {

/// Command-line overrides shared by every subcommand.
struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::filesystem::path> out;
  std::optional<std::string> w;
  std::optional<double> epsilon;
  std::optional<double> delta_cap;
};

/// Config file plus overrides.
ExperimentConfig resolve_config(const CommandOptions& opts);

/// "a, b, c" -> vector. Throws ConfigError on malformed input.
Vec parse_weights(const std::string& text);

// Output file names inside the output directory.
inline constexpr const char* kDatasetFile = "dataset.jsonl";
inline constexpr const char* kCacheFile = "train_cache.json";
inline constexpr const char* kSweepCsv = "sweep.csv";
inline constexpr const char* kSweepSvg = "sweep.svg";
inline constexpr const char* kCurveCsv = "curve.csv";
inline constexpr const char* kCurveSvg = "curve.svg";
inline constexpr const char* kSimplexSvg = "simplex.svg";
inline constexpr const char* kQFile = "qfunction.json";
inline constexpr const char* kTraceFile = "fpl_trace.jsonl";
inline constexpr const char* kFplReport = "fpl_report.csv";
inline constexpr const char* kEvalCsv = "eval.csv";

/// Each command reads/writes files in cfg.out_dir and logs progress to `log`.
void cmd_collect(const ExperimentConfig& cfg, std::ostream& log);
void cmd_train(const ExperimentConfig& cfg, const std::optional<std::string>& w, std::ostream& log);
void cmd_sweep(const ExperimentConfig& cfg, std::ostream& log);
void cmd_fpl(const ExperimentConfig& cfg, const std::optional<std::string>& w, std::ostream& log);
void cmd_eval(const ExperimentConfig& cfg, const std::optional<std::string>& w, std::ostream& log);
/// Re-renders figures from sweep.csv (and curve.csv when present).
void cmd_plot(const std::filesystem::path& out_dir, std::ostream& log);

/// Loads the dataset written by `collect` and builds the experiment.
Experiment open_experiment(const ExperimentConfig& cfg);

/// Runs `name` and maps errors to exit codes (0, 2 config, 3 infeasible,
/// 4 numerical); error messages go to `err`.
int run_command(const std::string& name, const CommandOptions& opts, std::ostream& log, std::ostream& err);

}  // namespace admissible::cli
