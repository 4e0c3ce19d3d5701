#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using stripe::cli::Invocation;

void add_common(CLI::App* sub, Invocation& call, bool seed, bool epsilon) {
  sub->add_option("config", call.config, "JSON configuration file")->required();
  sub->add_option("--out", call.out, "Output directory (overrides the config's 'output')");
  if (seed) {
    sub->add_option_function<std::uint64_t>(
        "--seed", [&call](const std::uint64_t& v) { call.overrides.seed = v; },
        "Override the random seed");
  }
  if (epsilon) {
    sub->add_option_function<double>(
        "--epsilon", [&call](const double& v) { call.overrides.epsilon = v; },
        "Override the tolerance epsilon");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stackelberg risk preference design: solvers, bound checks and scenarios"};
  app.require_subcommand(1);

  Invocation call;
  auto* follower = app.add_subcommand("solve-follower", "Solve the follower's risk minimization");
  add_common(follower, call, true, true);
  auto* leader = app.add_subcommand("solve-stripe", "Solve the leader's design problem");
  add_common(leader, call, true, true);
  auto* bounds = app.add_subcommand("verify-bounds", "Check the deviation and compromise bounds");
  add_common(bounds, call, true, true);

  auto* scenario = app.add_subcommand("scenario", "Run an application scenario");
  scenario->require_subcommand(1);
  auto* contract = scenario->add_subcommand("contract", "Contract design epsilon-IC sweep");
  add_common(contract, call, false, true);
  auto* meta = scenario->add_subcommand("meta", "Guided risk-sensitive meta-learning");
  add_common(meta, call, true, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : stripe::cli::exit_config;
  }

  if (*follower) return stripe::cli::run_solve_follower(call);
  if (*leader) return stripe::cli::run_solve_stripe(call);
  if (*bounds) return stripe::cli::run_verify_bounds(call);
  if (*contract) return stripe::cli::run_contract(call);
  if (*meta) return stripe::cli::run_meta(call);
  std::cerr << app.help();
  return stripe::cli::exit_config;
}
