#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stripe/bounds.hpp"
#include "stripe/contract.hpp"
#include "stripe/meta.hpp"
#include "stripe/stripe.hpp"

namespace stripe::cli {

using nlohmann::json;

/// Malformed, unreadable or inconsistent configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Strict reader over one JSON object: every key must be consumed before
/// finish(), otherwise the leftovers are reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path);

  bool has(const std::string& key) const;
  const json& raw(const std::string& key);
  Section child(const std::string& key);

  template <class T>
  T required(const std::string& key) {
    return convert<T>(raw(key), key);
  }

  template <class T>
  T optional(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    return convert<T>(raw(key), key);
  }

  void finish() const;
  const std::string& path() const { return path_; }

 private:
  template <class T>
  T convert(const json& value, const std::string& key) const {
    try {
      return value.get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong type");
    }
  }

  const json* node_;
  std::string path_;
  std::set<std::string> used_;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
};

/// Reads and parses a JSON file. Throws ConfigError if it is missing or
/// malformed.
json load_config(const std::filesystem::path& path);

struct FollowerConfig {
  ScenarioSet scenarios;
  LossModel model;
  std::optional<TypeSpace> types;
  std::optional<TypeDistribution> mu;
  std::optional<RiskSpectrum> spectrum;
  SolverSettings solver;
  /// Optional epsilon-optimal set report on a tensor grid.
  std::optional<double> epsilon;
  std::size_t points_per_axis = 101;
};

struct StripeConfig {
  StripeProblem problem;
  StripeSettings settings;
};

struct BoundsConfig {
  FamilyParams family;
  std::uint64_t first_seed = 1;
  std::size_t instances = 20;
  std::vector<std::string> checks;
  double epsilon = 1e-3;
  double growth_exclusion = 2e-3;
  /// mu = r mu_bar + (1 - r) mu0 in the deviation check.
  double deviation_r = 0.5;
  double reduction_r = 0.5;
  CompromiseSetup compromise;
};

struct ContractConfig {
  ContractInstance instance;
  std::vector<double> epsilons;
  std::optional<double> max_exponent;
};

struct MetaConfig {
  MetaInstance instance;
  ScenarioSet data;
  MetaSettings settings;
};

FollowerConfig parse_follower_config(const json& root, const Overrides& overrides,
                                     const std::filesystem::path& base);
StripeConfig parse_stripe_config(const json& root, const Overrides& overrides,
                                 const std::filesystem::path& base);
BoundsConfig parse_bounds_config(const json& root, const Overrides& overrides);
ContractConfig parse_contract_config(const json& root, const Overrides& overrides);
MetaConfig parse_meta_config(const json& root, const Overrides& overrides,
                             const std::filesystem::path& base);

/// Output directory named by the config (key "output"), if any.
std::optional<std::string> output_directory(const json& root);

}  // namespace stripe::cli
