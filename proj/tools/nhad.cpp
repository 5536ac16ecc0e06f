#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nhad/config.hpp"
#include "nhad/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Non-Hermitian two-level design, synthesis and verification"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  bool quiet = false;
  std::string reference_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option("--set", overrides, "Override a key, e.g. --set schedule.mu=0.4")->allow_extra_args(false);
    sub->add_option("--out", out_dir, "Output directory (default: run.output_dir)");
    sub->add_flag("--quiet", quiet, "Suppress progress messages");
  };
  auto* synth = app.add_subcommand("synthesize", "Write fields.csv, design.csv and summary.json");
  auto* sim = app.add_subcommand("simulate", "Integrate the dynamics and write populations.csv");
  auto* check = app.add_subcommand("check", "Write the adiabaticity report.json");
  auto* compare = app.add_subcommand("compare", "Write real-vs-ideal metrics.json");
  auto* sweep = app.add_subcommand("sweep", "Run the configured parameter sweep and write sweep.csv");
  for (auto* sub : {synth, sim, check, compare, sweep}) add_common(sub);
  compare->add_option("--reference", reference_path, "Second configuration to compare against")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nhad::exit_code::usage;
  }

  nhad::RunContext ctx;
  ctx.quiet = quiet;
  if (!out_dir.empty()) ctx.out_dir = out_dir;

  try {
    const auto path = config_path.empty() ? std::nullopt : std::optional<std::string>(config_path);
    const nhad::RunConfig config = nhad::load_config(path, overrides);
    if (synth->parsed()) return nhad::run_synthesize(config, ctx);
    if (sim->parsed()) return nhad::run_simulate(config, ctx);
    if (check->parsed()) return nhad::run_check(config, ctx);
    if (sweep->parsed()) return nhad::run_sweep(config, ctx);
    std::optional<nhad::RunConfig> reference;
    if (!reference_path.empty()) reference = nhad::load_config(reference_path);
    return nhad::run_compare(config, reference, ctx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nhad::exit_code_for(e);
  }
}
