#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "state_transport/commands.hpp"
#include "state_transport/suites.hpp"

int main(int argc, char** argv) {
  namespace st = state_transport;
  CLI::App app{"Commutant-preserving unitary transport of vector states"};
  app.require_subcommand(1);

  st::RunConfig run;
  std::uint64_t run_seed = 0;
  auto* run_cmd = app.add_subcommand("run", "Run one command described by a JSON config");
  run_cmd->add_option("--config", run.config_path, "JSON config file")->required();
  run_cmd->add_option("--out", run.out_path, "Write the JSON report here instead of stdout");
  run_cmd->add_option("--csv", run.csv_path, "Write path samples as CSV");
  auto* seed_opt = run_cmd->add_option("--seed", run_seed, "Seed overriding the config");

  st::VerifyConfig verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run a randomized property suite");
  verify_cmd->add_option("--suite", verify.suite, "Suite name")
      ->required()
      ->check(CLI::IsMember(st::suite_names()));
  verify_cmd->add_option("--seed", verify.seed, "Base seed");
  verify_cmd->add_option("--instances", verify.instances, "Number of instances")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--out", verify.out_path, "Write the JSON summary here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run_cmd) {
    if (*seed_opt) run.seed = run_seed;
    return st::run_command(run, std::cout, std::cerr);
  }
  return st::verify_command(verify, std::cout, std::cerr);
}
