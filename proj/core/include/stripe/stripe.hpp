#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "stripe/follower.hpp"
#include "stripe/grid.hpp"

namespace stripe {

enum class LeaderLossKind { zero, quadratic, distance };

const char* to_string(LeaderLossKind kind);
LeaderLossKind leader_loss_kind_from_string(const std::string& name);

/// The leader's cost L(x) on decisions.
///   zero       L = 0
///   quadratic  L = w |x - target|^2
///   distance   L = w |x - target|
class LeaderLoss {
 public:
  static LeaderLoss zero();
  static LeaderLoss quadratic(Point target, double weight = 1.0);
  static LeaderLoss distance(Point target, double weight = 1.0);

  LeaderLossKind kind() const { return kind_; }
  const Point& target() const { return target_; }
  double weight() const { return weight_; }

  double evaluate(std::span<const double> x) const;
  Point subgradient(std::span<const double> x) const;
  /// Exact Lipschitz constant of L over the box.
  double lipschitz(const Box& box) const;

 private:
  LeaderLoss(LeaderLossKind kind, Point target, double weight);

  LeaderLossKind kind_;
  Point target_;
  double weight_;
};

struct StripeProblem {
  TypeSpace types;
  TypeDistribution mu0;
  double gamma;
  LeaderLoss leader;
  LossModel model;
  ScenarioSet scenarios;

  /// Throws std::invalid_argument on gamma <= 0 or mismatched dimensions.
  StripeProblem(TypeSpace types, TypeDistribution mu0, double gamma, LeaderLoss leader,
                LossModel model, ScenarioSet scenarios);
};

/// J(mu, x) = L(x) + gamma W1(mu, mu0). Throws std::domain_error if x is
/// outside the box.
double leader_objective(const TypeDistribution& mu, std::span<const double> x,
                        const StripeProblem& problem);

/// Per-type risks rho_m(f(x, .)) at a single decision.
std::vector<double> type_risks(std::span<const double> x, const StripeProblem& problem);

struct VerificationReport {
  double epsilon = 0.0;
  double delta = 0.0;
  /// U(mu_hat, x_hat) and the best known U*(mu_hat).
  double follower_value = 0.0;
  double follower_optimum = 0.0;
  bool follower_ok = false;
  /// Worst leader value over the grid epsilon-optimal set of mu_hat (and x_hat).
  double candidate_worst = 0.0;
  /// Grid estimate of inf_mu sup_{x in X^eps(mu)} J(mu, x).
  double robust_value = 0.0;
  /// Smallest delta that would pass the leader condition.
  double required_delta = 0.0;
  bool leader_ok = false;
  bool certified = false;
};

struct StripeIterate {
  int round = 0;
  int iteration = 0;
  double penalty = 0.0;
  double leader_value = 0.0;
  double violation = 0.0;
  double best = 0.0;
  std::vector<double> mu;
  Point x;
};

struct Equilibrium {
  Equilibrium(TypeDistribution mu, Point x) : mu_hat(std::move(mu)), x_hat(std::move(x)) {}

  TypeDistribution mu_hat;
  Point x_hat;
  double leader_value = 0.0;
  double follower_value = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  bool certified = false;
  bool feasible = false;
  std::string diagnostics;
  std::vector<StripeIterate> trace;
  VerificationReport verification;
};

/// Leader-side grid oracle: a simplex lattice times a decision grid with the
/// per-type risk table, leader losses and design costs cached.
class StripeGrid {
 public:
  /// Throws std::length_error if lattice size times grid size exceeds `cap`.
  StripeGrid(const StripeProblem& problem, std::vector<TypeDistribution> lattice,
             std::vector<Point> decisions, std::size_t cap = 50'000'000);

  const RiskTable& table() const { return table_; }
  const std::vector<TypeDistribution>& lattice() const { return lattice_; }
  const std::vector<double>& leader_losses() const { return leader_losses_; }
  const std::vector<double>& design_costs() const { return design_costs_; }
  /// Follower objective of lattice member i at every grid point.
  const std::vector<double>& objective(std::size_t i) const { return objectives_[i]; }
  double minimum(std::size_t i) const { return minima_[i]; }
  /// Grid epsilon-optimal set of lattice member i.
  std::vector<std::size_t> epsilon_set(std::size_t i, double eps) const;

 private:
  RiskTable table_;
  std::vector<TypeDistribution> lattice_;
  std::vector<double> leader_losses_;
  std::vector<double> design_costs_;
  std::vector<std::vector<double>> objectives_;
  std::vector<double> minima_;
};

/// Lattice with the given number of steps and a tensor grid over the box.
StripeGrid make_stripe_grid(const StripeProblem& problem, std::size_t simplex_steps,
                            std::size_t points_per_axis, std::size_t cap = 50'000'000);

struct StripeSettings {
  /// Relaxation of the value constraint U_mu(x) - U*_mu <= epsilon.
  double epsilon = 1e-4;
  /// Penalty rounds stop once the violation is at most feas_tol; a negative
  /// value means epsilon / 10.
  double feas_tol = -1.0;
  double penalty_init = 1.0;
  double penalty_growth = 10.0;
  int penalty_rounds = 6;
  int inner_iterations = 100;
  /// Initial step lengths (simplex units and fractions of the box diameter).
  double step_mu = 0.1;
  double step_x = 0.1;
  /// Certification target for verify_equilibrium.
  double delta = 1e-2;
  std::size_t verify_simplex_steps = 50;
  std::size_t verify_points_per_axis = 201;
  /// Skip the grid certification (the result is then never certified).
  bool verify = true;
  SolverSettings follower = {0.1, 300, 1e-9, 100, true, 60, {}, 0};
};

Equilibrium solve_stripe(const StripeProblem& problem, const StripeSettings& settings = {});

/// Exhaustive optimistic search: for each lattice member the cheapest grid
/// decision inside its grid epsilon-optimal set. Ties go to the smallest
/// (lattice, grid) index.
Equilibrium brute_force_stripe(const StripeProblem& problem, const StripeGrid& grid, double eps);

/// Grid estimate of inf_mu sup_{x in X^eps(mu)} J(mu, x), the pessimistic
/// value of the game.
double robust_grid_value(const StripeGrid& grid, double eps);

/// Definition check of an epsilon-robust delta-approximate equilibrium with
/// the infimum and supremum replaced by grid extrema.
VerificationReport verify_equilibrium(const Equilibrium& candidate, const StripeProblem& problem,
                                      double eps, double delta, const StripeGrid& grid,
                                      const SolverSettings& follower = {});

}  // namespace stripe
