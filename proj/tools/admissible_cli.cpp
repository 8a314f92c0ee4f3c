// Command-line driver: collect | train | sweep | fpl | eval | plot.
#include <iostream>

#include <CLI11.hpp>

#include "admissible/cli/commands.hpp"

int main(int argc, char** argv) {
  using admissible::cli::CommandOptions;
  CLI::App app{"Admissible reward polytopes for batch reinforcement learning"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::string config, out, w;
  std::uint64_t seed = 0;
  int jobs = 1;
  double epsilon = 0.0, delta_cap = 0.0;

  const std::pair<const char*, const char*> commands[] = {
      {"collect", "Generate the logged batch (dataset.jsonl + metadata)"},
      {"train", "Train and evaluate policies for the weight grid (or one --w)"},
      {"sweep", "Classify the weight grid and write sweep.csv plus figures"},
      {"fpl", "Search for the admissible weights nearest --w"},
      {"eval", "Off-policy report for the policy trained on --w"},
      {"plot", "Re-render figures from an existing sweep.csv"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "Experiment config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Seed (overrides the config)");
    sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "Output directory (overrides the config)");
    const std::string n = name;
    if (n == "train" || n == "fpl" || n == "eval") sub->add_option("--w", w, "Comma-separated reward weights");
    if (n == "sweep" || n == "fpl" || n == "eval" || n == "train") {
      sub->add_option("--epsilon", epsilon, "Consistency threshold")->check(CLI::NonNegativeNumber);
      sub->add_option("--delta-cap", delta_cap, "Evaluability threshold")->check(CLI::NonNegativeNumber);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  opts.config = config;
  if (sub->count("--seed")) opts.seed = seed;
  if (sub->count("--jobs")) opts.jobs = jobs;
  if (sub->count("--out")) opts.out = out;
  if (sub->get_option_no_throw("--w") && sub->count("--w")) opts.w = w;
  if (sub->get_option_no_throw("--epsilon") && sub->count("--epsilon")) opts.epsilon = epsilon;
  if (sub->get_option_no_throw("--delta-cap") && sub->count("--delta-cap")) opts.delta_cap = delta_cap;
  return admissible::cli::run_command(sub->get_name(), opts, std::cerr, std::cerr);
}
