#include <cstdint>
#include <iostream>

#include "CLI11.hpp"

#include "benda/artifacts.hpp"
#include "benda/cli_commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Rayleigh-Benard twin-experiment driver"};
  app.set_version_flag("--version", benda::kToolVersion);
  app.require_subcommand(1);

  benda::RunOptions run_opts;
  std::uint64_t seed = 0;
  CLI::App* run = app.add_subcommand("run", "one twin experiment from a config file");
  run->add_option("--config", run_opts.config_path, "scenario config file")->required();
  run->add_option("--out", run_opts.out_dir, "output directory");
  CLI::Option* run_seed = run->add_option("--seed-override", seed, "replace the noise seed");

  benda::SuiteOptions suite_opts;
  CLI::App* suite = app.add_subcommand("suite", "catalog scenarios matching a filter");
  suite->add_option("--filter", suite_opts.filter, "glob over scenario names (default *)");
  suite->add_option("--out", suite_opts.out_dir, "output directory");
  suite->add_option("--jobs", suite_opts.jobs, "concurrent scenarios");
  CLI::Option* suite_seed = suite->add_option("--seed-override", seed, "replace the noise seed");

  benda::ReferenceOptions ref_opts;
  CLI::App* reference = app.add_subcommand("reference", "reference trajectory and observations");
  reference->add_option("--config", ref_opts.config_path, "scenario config file")->required();
  reference->add_option("--out", ref_opts.out_dir, "output directory");

  CLI::App* catalog = app.add_subcommand("catalog", "list catalog scenario names");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (run_seed->count()) run_opts.seed_override = seed;
    return benda::cmd_run(run_opts, std::cout);
  }
  if (suite->parsed()) {
    if (suite_seed->count()) suite_opts.seed_override = seed;
    return benda::cmd_suite(suite_opts, std::cout);
  }
  if (reference->parsed()) return benda::cmd_reference(ref_opts, std::cout);
  if (catalog->parsed()) return benda::cmd_catalog(std::cout);
  return 0;
}
