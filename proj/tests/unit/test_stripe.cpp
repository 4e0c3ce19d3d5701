#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stripe/grid.hpp"
#include "stripe/stripe.hpp"

using namespace stripe;

namespace {

ScenarioSet shifted_exponential(std::size_t count, std::uint64_t seed) {
  ScenarioSpec spec;
  spec.kind = ScenarioSpec::Kind::exponential;
  spec.dimension = 1;
  spec.location = {0.1};
  spec.scale = {0.2};
  return ScenarioSet::generate(spec, count, seed);
}

StripeProblem small_problem(double gamma, LeaderLoss leader) {
  return StripeProblem(TypeSpace({0.0, 1.0}, {RiskSpectrum::flat(),
                                              average_value_at_risk_spectrum(0.8)}),
                       TypeDistribution({0.8, 0.2}), gamma, std::move(leader),
                       LossModel::quadratic(Box({0.0}, {1.0})), shifted_exponential(80, 7));
}

StripeSettings quick_settings() {
  StripeSettings s;
  s.epsilon = 1e-3;
  s.verify_simplex_steps = 40;
  s.verify_points_per_axis = 201;
  return s;
}

}  // namespace

TEST_CASE("risk table matches direct evaluation") {
  const auto problem = small_problem(0.1, LeaderLoss::zero());
  const auto grid = problem.model.domain().grid(21);
  const RiskTable table(problem.types, problem.scenarios, problem.model, grid);
  CHECK(table.points() == 21);
  CHECK(table.types() == 2);
  const TypeDistribution mu({0.3, 0.7});
  const auto values = table.objective(mu.weights());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK(std::abs(values[j] - follower_objective(grid[j], mu, problem.types, problem.scenarios,
                                                  problem.model)) <= 1e-12);
    const auto risks = type_risks(grid[j], problem);
    CHECK(std::abs(table.risk(1, j) - risks[1]) <= 1e-12);
  }
  const double best = table.minimum(mu.weights());
  CHECK(best == *std::min_element(values.begin(), values.end()));
  const auto set = table.epsilon_set(mu.weights(), 0.0);
  REQUIRE(set.size() >= 1);
  CHECK(values[set.front()] == best);
  CHECK(table.epsilon_set(mu.weights(), 1e-2).size() >= set.size());
}

TEST_CASE("point-set distance") {
  const std::vector<Point> set = {{0.0, 0.0}, {3.0, 4.0}};
  CHECK(distance(Point{0.0, 0.0}, Point{3.0, 4.0}) == doctest::Approx(5.0));
  CHECK(point_set_distance(Point{3.0, 3.0}, set) == doctest::Approx(1.0));
  CHECK(point_set_distance(Point{0.0, 0.0}, set) == 0.0);
}

TEST_CASE("leader losses") {
  const auto q = LeaderLoss::quadratic({0.5}, 2.0);
  CHECK(q.evaluate(Point{0.2}) == doctest::Approx(0.18));
  CHECK(q.subgradient(Point{0.2})[0] == doctest::Approx(-1.2));
  CHECK(q.lipschitz(Box({0.0}, {1.0})) == doctest::Approx(2.0));
  const auto d = LeaderLoss::distance({0.0, 0.0}, 3.0);
  CHECK(d.evaluate(Point{3.0, 4.0}) == doctest::Approx(15.0));
  CHECK(d.lipschitz(Box({0.0, 0.0}, {1.0, 1.0})) == doctest::Approx(3.0));
  CHECK(LeaderLoss::zero().evaluate(Point{0.7}) == 0.0);
  CHECK(leader_loss_kind_from_string(to_string(LeaderLossKind::distance)) ==
        LeaderLossKind::distance);
}

TEST_CASE("leader objective") {
  const auto problem = small_problem(2.0, LeaderLoss::quadratic({0.5}));
  // W1((0.3, 0.7), (0.8, 0.2)) = 0.5 with unit type spacing.
  CHECK(std::abs(leader_objective(TypeDistribution({0.3, 0.7}), Point{0.2}, problem) -
                 (0.09 + 1.0)) <= 1e-12);
  CHECK(leader_objective(problem.mu0, Point{0.5}, problem) == 0.0);
  CHECK_THROWS_AS(leader_objective(problem.mu0, Point{1.5}, problem), std::domain_error);
  CHECK_THROWS_AS(small_problem(0.0, LeaderLoss::zero()), std::invalid_argument);
  CHECK_THROWS_AS(small_problem(-1.0, LeaderLoss::zero()), std::invalid_argument);
}

TEST_CASE("a zero leader loss keeps the reference population") {
  const auto problem = small_problem(0.5, LeaderLoss::zero());
  const auto eq = solve_stripe(problem, quick_settings());
  CHECK(eq.feasible);
  CHECK(eq.leader_value <= 1e-9);
  CHECK(std::abs(eq.mu_hat[0] - 0.8) <= 1e-6);
}

TEST_CASE("a prohibitive design cost keeps the reference population") {
  const auto problem = small_problem(1e6, LeaderLoss::quadratic({0.38}, 10.0));
  const auto eq = solve_stripe(problem, quick_settings());
  CHECK(eq.feasible);
  CHECK(std::abs(eq.mu_hat[0] - 0.8) <= 1e-6);
  const auto follower = solve_follower(problem.mu0, problem.types, problem.scenarios, problem.model);
  const double u = follower_objective(eq.x_hat, problem.mu0, problem.types, problem.scenarios,
                                      problem.model);
  CHECK(u <= follower.value + 1e-3 + 1e-9);
}

TEST_CASE("solver agrees with exhaustive search") {
  const auto problem = small_problem(0.05, LeaderLoss::quadratic({0.38}, 10.0));
  const auto settings = quick_settings();
  const auto eq = solve_stripe(problem, settings);
  const auto grid = make_stripe_grid(problem, 100, 401);
  const auto brute = brute_force_stripe(problem, grid, settings.epsilon);
  CHECK(eq.feasible);
  CHECK(brute.feasible);
  CHECK(std::abs(eq.leader_value - brute.leader_value) <= 2e-3);
  CHECK(std::abs(eq.leader_value -
                 leader_objective(eq.mu_hat, eq.x_hat, problem)) <= 1e-12);
  CHECK(robust_grid_value(grid, settings.epsilon) >= brute.leader_value - 1e-12);
}

TEST_CASE("certification is monotone in delta") {
  const auto problem = small_problem(0.05, LeaderLoss::quadratic({0.38}, 10.0));
  auto settings = quick_settings();
  settings.verify = false;
  const auto eq = solve_stripe(problem, settings);
  const auto grid = make_stripe_grid(problem, 40, 201);
  bool seen_pass = false;
  double required = -1.0;
  for (double delta : {0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
    const auto report = verify_equilibrium(eq, problem, settings.epsilon, delta, grid);
    if (required < 0) required = report.required_delta;
    CHECK(report.required_delta == required);
    CHECK(report.leader_ok == (delta >= report.required_delta));
    if (seen_pass) CHECK(report.leader_ok);
    seen_pass = seen_pass || report.leader_ok;
  }
  CHECK(seen_pass);
}

TEST_CASE("grid size cap") {
  const auto problem = small_problem(0.1, LeaderLoss::zero());
  CHECK_THROWS_AS(make_stripe_grid(problem, 1000, 1001, 1000), std::length_error);
}
