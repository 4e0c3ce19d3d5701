#include "stripe/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace stripe {

namespace {

constexpr double kHoldSlack = 1e-9;

std::vector<Point> points_of(const RiskTable& table, const std::vector<std::size_t>& idx) {
  std::vector<Point> out;
  out.reserve(idx.size());
  for (std::size_t j : idx) out.push_back(table.point(j));
  return out;
}

void finish(BoundReport& r) { r.holds = r.lhs <= r.rhs + kHoldSlack; }

}  // namespace

GrowthEstimate estimate_growth_constant(const RiskTable& table, std::span<const double> mu,
                                        double exclusion_radius, double set_tolerance) {
  if (!(exclusion_radius > 0.0)) throw std::invalid_argument("exclusion radius must be positive");
  const auto values = table.objective(mu);
  GrowthEstimate g;
  g.exclusion_radius = exclusion_radius;
  g.grid_points = values.size();
  g.minimum = *std::min_element(values.begin(), values.end());
  std::vector<Point> solution;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] <= g.minimum + set_tolerance) solution.push_back(table.point(j));
  }
  g.solution_points = solution.size();
  g.iota = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double d = point_set_distance(table.point(j), solution);
    if (d <= exclusion_radius) continue;
    ++g.used_points;
    g.iota = std::min(g.iota, (values[j] - g.minimum) / (d * d));
  }
  if (g.used_points == 0) {
    throw std::domain_error("every grid point lies inside the exclusion radius");
  }
  return g;
}

double set_deviation(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("set deviation of an empty set");
  double worst = 0.0;
  for (const auto& p : a) worst = std::max(worst, point_set_distance(p, b));
  return worst;
}

nlohmann::json to_json(const BoundReport& r) {
  return {{"check", r.check},         {"lhs", r.lhs},   {"rhs", r.rhs},
          {"holds", r.holds},         {"epsilon", r.epsilon},
          {"r", r.r},                 {"W", r.w},       {"iota", r.iota},
          {"lipschitz", r.lipschitz}, {"gamma", r.gamma}, {"M", r.regularity}};
}

BoundReport check_deviation_bound(const StripeProblem& problem, const RiskTable& table,
                                  const TypeDistribution& mu, const TypeDistribution& mu_bar,
                                  double eps, double iota) {
  if (!(eps >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
  if (!(iota > 0.0)) throw std::invalid_argument("growth constant must be positive");
  BoundReport r;
  r.check = "deviation";
  r.epsilon = eps;
  r.iota = iota;
  r.gamma = problem.gamma;
  r.w = wasserstein1(mu, mu_bar, problem.types);
  const auto a = points_of(table, table.epsilon_set(mu.weights(), eps));
  const auto b = points_of(table, table.epsilon_set(mu_bar.weights(), eps));
  r.lhs = set_deviation(a, b);
  r.rhs = std::sqrt(3.0 * r.w / iota);
  finish(r);
  return r;
}

BoundReport check_performance_reduction(const StripeProblem& problem, const RiskTable& table,
                                        const TypeDistribution& mu_bar, double r_mix, double eps,
                                        double iota, double lipschitz) {
  if (!(r_mix > 0.0 && r_mix < 1.0)) throw std::invalid_argument("r must lie in (0,1)");
  if (!(iota > 0.0)) throw std::invalid_argument("growth constant must be positive");
  BoundReport r;
  r.check = "performance_reduction";
  r.epsilon = eps;
  r.r = r_mix;
  r.iota = iota;
  r.lipschitz = lipschitz;
  r.gamma = problem.gamma;
  r.w = wasserstein1(mu_bar, problem.mu0, problem.types);
  if (r.w == 0.0) throw std::domain_error("perception gap W1(mu_bar, mu0) is zero");
  const auto mu = TypeDistribution::mixture(mu_bar, problem.mu0, r_mix);
  const auto near = table.epsilon_set(mu.weights(), eps);
  const auto target = table.epsilon_set(mu_bar.weights(), eps);
  double worst = 0.0;
  for (std::size_t j : near) {
    const double lj = problem.leader.evaluate(table.point(j));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k : target) {
      best = std::min(best, std::abs(lj - problem.leader.evaluate(table.point(k))));
    }
    worst = std::max(worst, best);
  }
  r.lhs = worst;
  r.rhs = lipschitz * std::sqrt(3.0 * (1.0 - r_mix) * r.w / iota);
  finish(r);
  return r;
}

double estimate_lipschitz(const LeaderLoss& loss, const std::vector<Point>& grid) {
  if (grid.size() < 2) throw std::invalid_argument("Lipschitz estimate needs two grid points");
  std::vector<double> values;
  values.reserve(grid.size());
  for (const auto& x : grid) values.push_back(loss.evaluate(x));
  double best = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      const double d = distance(grid[i], grid[j]);
      if (d > 0.0) best = std::max(best, std::abs(values[i] - values[j]) / d);
    }
  }
  return best;
}

RegularityEstimate estimate_regularity_constant(const StripeProblem& problem,
                                                const StripeGrid& grid, double eps,
                                                std::size_t trial_count, std::uint64_t seed,
                                                double proximity,
                                                const std::vector<std::size_t>& anchors) {
  if (trial_count == 0) throw std::invalid_argument("regularity estimate needs a trial");
  if (!(proximity > 0.0)) throw std::invalid_argument("proximity threshold must be positive");
  const auto& lattice = grid.lattice();
  const auto& table = grid.table();
  const std::size_t points = table.points();
  std::vector<std::vector<char>> member(lattice.size(), std::vector<char>(points, 0));
  std::vector<std::vector<std::size_t>> sets(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    sets[i] = grid.epsilon_set(i, eps);
    for (std::size_t j : sets[i]) member[i][j] = 1;
  }
  // Cheapest W1 move from lattice member i1 to one whose set holds x2.
  auto min_move = [&](std::size_t i1, std::size_t x2) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i2 = 0; i2 < lattice.size(); ++i2) {
      if (member[i2][x2]) best = std::min(best, wasserstein1(lattice[i1], lattice[i2], problem.types));
    }
    return best;
  };

  RegularityEstimate est;
  auto add = [&](std::size_t x1, std::size_t x2, double move) {
    ++est.trials;
    if (!std::isfinite(move)) {
      ++est.skipped;
      return;
    }
    est.m_hat = std::max(est.m_hat, move / distance(table.point(x1), table.point(x2)));
  };

  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < trial_count; ++t) {
    const std::size_t i1 = std::uniform_int_distribution<std::size_t>(0, lattice.size() - 1)(rng);
    const auto& set = sets[i1];
    const std::size_t x1 = set[std::uniform_int_distribution<std::size_t>(0, set.size() - 1)(rng)];
    std::vector<std::size_t> near;
    for (std::size_t j = 0; j < points; ++j) {
      const double d = distance(table.point(x1), table.point(j));
      if (d > 0.0 && d <= proximity) near.push_back(j);
    }
    if (near.empty()) {
      ++est.trials;
      ++est.skipped;
      continue;
    }
    const std::size_t x2 = near[std::uniform_int_distribution<std::size_t>(0, near.size() - 1)(rng)];
    add(x1, x2, min_move(i1, x2));
  }

  for (std::size_t i1 : anchors) {
    if (i1 >= lattice.size()) throw std::out_of_range("anchor index outside the lattice");
    std::vector<double> moves(points);
    for (std::size_t j = 0; j < points; ++j) moves[j] = min_move(i1, j);
    for (std::size_t x1 : sets[i1]) {
      for (std::size_t x2 = 0; x2 < points; ++x2) {
        const double d = distance(table.point(x1), table.point(x2));
        if (d > 0.0 && d <= proximity) add(x1, x2, moves[x2]);
      }
    }
  }
  return est;
}

CompromiseOutcome exact_grid_optimum(const StripeGrid& grid) {
  CompromiseOutcome out;
  out.optimum_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.lattice().size(); ++i) {
    for (std::size_t j : grid.epsilon_set(i, 0.0)) {
      const double v = grid.design_costs()[i] + grid.leader_losses()[j];
      if (v < out.optimum_value) {
        out.optimum_value = v;
        out.optimum_index = i;
        out.optimum_point = j;
      }
    }
  }
  return out;
}

CompromiseOutcome check_compromise_bound(const StripeProblem& problem, const StripeGrid& grid,
                                         const CompromiseInputs& in) {
  if (!(in.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(in.iota > 0.0)) throw std::invalid_argument("growth constant must be positive");
  CompromiseOutcome out = exact_grid_optimum(grid);
  const std::size_t points = grid.table().points();
  std::vector<char> star(points, 0);
  for (std::size_t j : grid.epsilon_set(out.optimum_index, in.epsilon)) star[j] = 1;
  double delta = 0.0;
  for (std::size_t i = 0; i < grid.lattice().size(); ++i) {
    for (std::size_t j : grid.epsilon_set(i, in.epsilon)) {
      if (!star[j]) continue;
      delta = std::max(delta, grid.design_costs()[i] + grid.leader_losses()[j] - out.optimum_value);
    }
  }
  BoundReport& r = out.report;
  r.check = "compromise";
  r.epsilon = in.epsilon;
  r.iota = in.iota;
  r.lipschitz = in.lipschitz;
  r.gamma = problem.gamma;
  r.regularity = in.regularity;
  r.lhs = delta;
  r.rhs = std::sqrt(in.epsilon / in.iota) * (in.lipschitz + problem.gamma * in.regularity);
  finish(r);
  return out;
}

CompromiseOutcome run_compromise_check(const StripeProblem& problem, const StripeGrid& grid,
                                       const CompromiseSetup& setup) {
  const auto optimum = exact_grid_optimum(grid);
  const auto& mu_star = grid.lattice()[optimum.optimum_index];
  const auto growth =
      estimate_growth_constant(grid.table(), mu_star.weights(), setup.exclusion_radius);
  const double lip = estimate_lipschitz(problem.leader, grid.table().grid());
  const auto reg = estimate_regularity_constant(problem, grid, setup.epsilon, setup.trials,
                                                setup.seed, setup.proximity,
                                                {optimum.optimum_index});
  return check_compromise_bound(problem, grid, {setup.epsilon, growth.iota, lip, reg.m_hat});
}

CounterexampleSink::CounterexampleSink(std::filesystem::path directory)
    : directory_(std::move(directory)) {}

bool CounterexampleSink::record(const BoundReport& report, const nlohmann::json& context) {
  if (report.holds) return false;
  std::filesystem::create_directories(directory_);
  std::ostringstream name;
  name << "counterexample_" << std::setw(4) << std::setfill('0') << count_ << '_' << report.check
       << ".json";
  std::ofstream out(directory_ / name.str());
  if (!out) throw std::runtime_error("cannot write counterexample record");
  out << nlohmann::json{{"report", to_json(report)}, {"context", context}}.dump(2) << '\n';
  ++count_;
  return true;
}

BoundInstance random_bound_instance(const FamilyParams& params, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };

  ScenarioSpec spec;
  spec.kind = ScenarioSpec::Kind::exponential;
  spec.dimension = 1;
  spec.location = {draw(0.05, 0.25)};
  spec.scale = {draw(0.1, 0.25)};
  auto scenarios = ScenarioSet::generate(spec, params.scenarios, seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<RiskSpectrum> spectra;
  spectra.push_back(average_value_at_risk_spectrum(draw(0.0, 0.3)));
  if (seed % 2 == 0) {
    spectra.push_back(average_value_at_risk_spectrum(draw(0.6, 0.9)));
  } else {
    spectra.push_back(mean_semideviation_spectrum(draw(0.5, 1.0), draw(0.1, 0.4)));
  }

  const Box box({0.0}, {1.0});
  auto model = LossModel::quadratic(box);
  const TypeSpace provisional({0.0, 1.0}, spectra);
  RiskTable table(provisional, scenarios, model, box.grid(params.grid_points));
  double gap = 0.0;
  for (std::size_t j = 0; j < table.points(); ++j) {
    gap = std::max(gap, std::abs(table.risk(0, j) - table.risk(1, j)));
  }
  gap = std::max(gap, 1e-6);

  const double p0 = draw(0.05, 0.95);
  double pbar = draw(0.05, 0.95);
  if (std::abs(pbar - p0) < 0.1) pbar = p0 < 0.5 ? p0 + 0.3 : p0 - 0.3;
  const LeaderLoss leader = LeaderLoss::quadratic({draw(0.0, 1.0)});

  StripeProblem problem(TypeSpace({0.0, gap}, std::move(spectra)), TypeDistribution({p0, 1.0 - p0}),
                        params.gamma, leader, std::move(model), std::move(scenarios));
  return {std::move(problem), TypeDistribution({pbar, 1.0 - pbar}), std::move(table)};
}

}  // namespace stripe
