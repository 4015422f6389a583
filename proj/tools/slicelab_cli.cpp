// Command-line front end for slice-management experiments.

#include <CLI11.hpp>

#include "slicelab/exp/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"slicelab: O-RAN slice management experiments"};
  slicelab::CliOptions opt;

  app.add_option("--config", opt.config_path, "config file (key = value sections)");
  app.add_option("--mode", opt.mode, "critic mode: attention | baseline")
      ->check(CLI::IsMember({"attention", "baseline"}));
  app.add_option("--bw", opt.bw, "bandwidth scenario: low | high")
      ->check(CLI::IsMember({"low", "high"}));
  app.add_option("--seed", opt.seed, "master seed");
  app.add_option("--out", opt.out_dir, "artifact output directory");
  app.add_option("--episodes", opt.episodes, "final-policy evaluation episodes per actor");
  app.add_flag("--compare", opt.compare, "run both modes over several seeds and summarize");
  app.add_flag("--dry-run", opt.dry_run, "validate and print the resolved config, no training");
  app.add_option("--seeds", opt.compare_seeds, "seed count for --compare (seed, seed+1, ...)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : slicelab::kExitConfig;
  }

  return slicelab::run_experiment(opt);
}
