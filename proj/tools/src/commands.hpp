#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "config.hpp"

namespace stripe::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_runtime = 1,
  exit_config = 2,
  exit_check_failed = 3,
};

struct Invocation {
  std::filesystem::path config;
  std::optional<std::string> out;
  Overrides overrides;
};

int run_solve_follower(const Invocation& call);
int run_solve_stripe(const Invocation& call);
int run_verify_bounds(const Invocation& call);
int run_contract(const Invocation& call);
int run_meta(const Invocation& call);

}  // namespace stripe::cli
