#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "stripe/type_space.hpp"

namespace stripe {

/// Hidden-action contract problem on finite grids.
///
/// Outcome k (principal loss xi_k) occurs with probability
/// (1 - x) low_effort[k] + x high_effort[k] under action x in [0, 1]. A
/// contract pays wage w_k on outcome k, drawn from `wage_levels`. The agent's
/// loss is effort_cost * x^effort_power - u(w_k) with the concave
/// piecewise-linear utility u(w) = min(w, kink + slope (w - kink)).
struct ContractInstance {
  std::vector<double> outcomes;
  std::vector<double> low_effort;
  std::vector<double> high_effort;
  std::vector<double> actions;
  std::vector<double> wage_levels;
  double reservation = std::numeric_limits<double>::infinity();
  double effort_cost = 1.0;
  double effort_power = 2.0;
  double utility_kink = 1.0;
  double utility_slope = 0.5;
  TypeSpace types;
  TypeDistribution mu0;
  double gamma = 1.0;
  std::size_t simplex_steps = 10;

  /// Throws std::invalid_argument on malformed grids or distributions.
  void validate() const;
  std::vector<double> outcome_probabilities(double action) const;
  double utility(double wage) const;
  /// Agent loss per outcome for the given wages and action.
  std::vector<double> agent_losses(const std::vector<double>& wages, double action) const;
};

struct ContractRecord {
  bool feasible = false;
  std::vector<double> wages;
  std::vector<double> mu;
  double action = 0.0;
  /// Expected payment plus expected loss plus gamma W1(mu, mu0).
  double principal_value = std::numeric_limits<double>::infinity();
  double design_cost = 0.0;
  /// Agent objective at the chosen action and its minimum over the action grid.
  double agent_value = 0.0;
  double agent_optimum = 0.0;
};

/// Exhaustive optimistic search over wages, lattice and actions with
/// epsilon-approximate incentive compatibility and individual rationality.
/// Ties go to the first cell in (wages, lattice, action) order.
ContractRecord solve_contract(const ContractInstance& instance, double eps_ic);

struct SweepRow {
  double epsilon = 0.0;
  double value = 0.0;
  double gap = 0.0;
  ContractRecord record;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Least-squares slope of log gap on log epsilon over rows with both
  /// positive; empty if fewer than two such rows.
  std::optional<double> exponent;
};

/// gap(eps) = value(0) - value(eps), rows sorted by epsilon (zero is always
/// included as the reference).
SweepResult sweep_epsilon_ic(const ContractInstance& instance, std::vector<double> epsilons);

}  // namespace stripe
