#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stripe/stripe.hpp"

namespace stripe {

struct GrowthEstimate {
  double iota = 0.0;
  double exclusion_radius = 0.0;
  double minimum = 0.0;
  /// Grid points treated as the solution set X*.
  std::size_t solution_points = 0;
  /// Grid points farther than the exclusion radius from X*.
  std::size_t used_points = 0;
  std::size_t grid_points = 0;
};

/// Smallest (U(x) - U*) / D(x, X*)^2 over grid points with D(x, X*) larger
/// than the exclusion radius. X* is every grid point within set_tolerance of
/// the grid minimum. Throws std::domain_error if no point qualifies.
GrowthEstimate estimate_growth_constant(const RiskTable& table, std::span<const double> mu,
                                        double exclusion_radius, double set_tolerance = 1e-9);

/// sup_{a in A} min_{b in B} |a - b| on finite sets.
double set_deviation(const std::vector<Point>& a, const std::vector<Point>& b);

struct BoundReport {
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double epsilon = 0.0;
  double r = 0.0;
  double w = 0.0;
  double iota = 0.0;
  double lipschitz = 0.0;
  double gamma = 0.0;
  double regularity = 0.0;
};

nlohmann::json to_json(const BoundReport& report);

/// lhs = D(X^eps(mu), X^eps(mu_bar)) on the table grid,
/// rhs = sqrt(3 W1(mu, mu_bar) / iota).
BoundReport check_deviation_bound(const StripeProblem& problem, const RiskTable& table,
                                  const TypeDistribution& mu, const TypeDistribution& mu_bar,
                                  double eps, double iota);

/// With mu = r mu_bar + (1 - r) mu0 and W = W1(mu_bar, mu0):
/// lhs = max over X^eps(mu) of min over X^eps(mu_bar) of |L(x) - L(x_bar)|,
/// rhs = Lip_L sqrt(3 (1 - r) W / iota). Throws std::domain_error if W = 0.
BoundReport check_performance_reduction(const StripeProblem& problem, const RiskTable& table,
                                        const TypeDistribution& mu_bar, double r, double eps,
                                        double iota, double lipschitz);

/// Largest |L(x) - L(y)| / |x - y| over grid pairs. Throws on fewer than two
/// points.
double estimate_lipschitz(const LeaderLoss& loss, const std::vector<Point>& grid);

struct RegularityEstimate {
  double m_hat = 0.0;
  std::size_t trials = 0;
  /// Trials with no lattice member accepting x2.
  std::size_t skipped = 0;
};

/// Empirical metric-regularity constant: the largest
/// min{W1(mu1, mu2) : x2 in X^eps(mu2)} / |x1 - x2| over random trials with
/// mu1 on the lattice, x1 in X^eps(mu1) and 0 < |x1 - x2| <= proximity.
/// Lattice members listed in `anchors` are additionally scanned exhaustively
/// over every such (x1, x2).
RegularityEstimate estimate_regularity_constant(const StripeProblem& problem,
                                                const StripeGrid& grid, double eps,
                                                std::size_t trial_count, std::uint64_t seed,
                                                double proximity,
                                                const std::vector<std::size_t>& anchors = {});

struct CompromiseInputs {
  double epsilon = 0.0;
  double iota = 0.0;
  double lipschitz = 0.0;
  double regularity = 0.0;
};

struct CompromiseOutcome {
  BoundReport report;
  /// Lattice index of the exact-response optimum (mu*, x*).
  std::size_t optimum_index = 0;
  std::size_t optimum_point = 0;
  double optimum_value = 0.0;
};

/// Exact-response optimum on the grid (lattice index, grid index, value).
CompromiseOutcome exact_grid_optimum(const StripeGrid& grid);

/// delta_emp = max J(mu_hat, x_hat) - J(mu*, x*) over lattice mu_hat and grid
/// x_hat in X^eps(mu*) and X^eps(mu_hat), against
/// sqrt(eps / iota) (Lip_L + gamma M).
CompromiseOutcome check_compromise_bound(const StripeProblem& problem, const StripeGrid& grid,
                                         const CompromiseInputs& inputs);

struct CompromiseSetup {
  double epsilon = 1e-3;
  /// Exclusion radius of the growth estimate at mu*.
  double exclusion_radius = 5e-4;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  double proximity = 0.05;
};

/// Full pipeline: grid optimum, growth constant at mu*, Lip_L over the grid,
/// regularity constant (anchored at mu*), then check_compromise_bound.
CompromiseOutcome run_compromise_check(const StripeProblem& problem, const StripeGrid& grid,
                                       const CompromiseSetup& setup);

/// Writes one JSON record per failing report into a directory.
class CounterexampleSink {
 public:
  explicit CounterexampleSink(std::filesystem::path directory);

  /// Persists the report with its context when it does not hold. Returns
  /// true if a record was written.
  bool record(const BoundReport& report, const nlohmann::json& context);
  std::size_t count() const { return count_; }
  const std::filesystem::path& directory() const { return directory_; }

 private:
  std::filesystem::path directory_;
  std::size_t count_ = 0;
};

// Randomized test families for the bound checks: M = 2 types on X = [0, 1]
// with quadratic losses and shifted-exponential scenarios.

struct FamilyParams {
  std::size_t scenarios = 200;
  /// Decision grid points on [0, 1] (1001 gives resolution 1e-3).
  std::size_t grid_points = 1001;
  std::size_t simplex_steps = 200;
  double gamma = 1.0;
};

struct BoundInstance {
  StripeProblem problem;
  TypeDistribution mu_bar;
  RiskTable table;
};

/// The type gap is set to the largest per-type risk difference over the grid,
/// so each decision's risk is 1-Lipschitz in the type label.
BoundInstance random_bound_instance(const FamilyParams& params, std::uint64_t seed);

}  // namespace stripe
