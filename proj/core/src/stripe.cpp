#include "stripe/stripe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace stripe {

namespace {

double euclidean_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

const char* to_string(LeaderLossKind kind) {
  switch (kind) {
    case LeaderLossKind::zero: return "zero";
    case LeaderLossKind::quadratic: return "quadratic";
    case LeaderLossKind::distance: return "distance";
  }
  return "unknown";
}

LeaderLossKind leader_loss_kind_from_string(const std::string& name) {
  for (auto kind : {LeaderLossKind::zero, LeaderLossKind::quadratic, LeaderLossKind::distance}) {
    if (name == to_string(kind)) return kind;
  }
  throw std::invalid_argument("unknown leader loss kind '" + name + "'");
}

LeaderLoss::LeaderLoss(LeaderLossKind kind, Point target, double weight)
    : kind_(kind), target_(std::move(target)), weight_(weight) {
  if (!(weight_ >= 0.0) || !std::isfinite(weight_)) {
    throw std::invalid_argument("leader loss weight must be finite and nonnegative");
  }
  for (double t : target_) {
    if (!std::isfinite(t)) throw std::invalid_argument("leader loss target must be finite");
  }
}

LeaderLoss LeaderLoss::zero() { return LeaderLoss(LeaderLossKind::zero, {}, 0.0); }

LeaderLoss LeaderLoss::quadratic(Point target, double weight) {
  return LeaderLoss(LeaderLossKind::quadratic, std::move(target), weight);
}

LeaderLoss LeaderLoss::distance(Point target, double weight) {
  return LeaderLoss(LeaderLossKind::distance, std::move(target), weight);
}

double LeaderLoss::evaluate(std::span<const double> x) const {
  if (kind_ == LeaderLossKind::zero) return 0.0;
  const double d = stripe::distance(x, target_);
  return kind_ == LeaderLossKind::quadratic ? weight_ * d * d : weight_ * d;
}

Point LeaderLoss::subgradient(std::span<const double> x) const {
  Point g(x.size(), 0.0);
  if (kind_ == LeaderLossKind::zero) return g;
  if (kind_ == LeaderLossKind::quadratic) {
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = 2.0 * weight_ * (x[j] - target_[j]);
    return g;
  }
  const double d = stripe::distance(x, target_);
  if (d == 0.0) return g;
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = weight_ * (x[j] - target_[j]) / d;
  return g;
}

double LeaderLoss::lipschitz(const Box& box) const {
  switch (kind_) {
    case LeaderLossKind::zero: return 0.0;
    case LeaderLossKind::distance: return weight_;
    case LeaderLossKind::quadratic: {
      // Gradient norm 2w|x - target| peaks at the box corner farthest away.
      double s = 0.0;
      for (std::size_t j = 0; j < box.dimension(); ++j) {
        const double far = std::max(std::abs(box.lower[j] - target_[j]),
                                    std::abs(box.upper[j] - target_[j]));
        s += far * far;
      }
      return 2.0 * weight_ * std::sqrt(s);
    }
  }
  return 0.0;
}

StripeProblem::StripeProblem(TypeSpace types_, TypeDistribution mu0_, double gamma_,
                             LeaderLoss leader_, LossModel model_, ScenarioSet scenarios_)
    : types(std::move(types_)),
      mu0(std::move(mu0_)),
      gamma(gamma_),
      leader(std::move(leader_)),
      model(std::move(model_)),
      scenarios(std::move(scenarios_)) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("gamma must be positive and finite");
  }
  if (mu0.size() != types.size()) throw std::invalid_argument("mu0 does not match the type space");
  if (leader.kind() != LeaderLossKind::zero && leader.target().size() != model.dimension()) {
    throw std::invalid_argument("leader target dimension does not match the decision space");
  }
  if (scenarios.dimension() != model.scenario_dimension()) {
    throw std::invalid_argument("scenario dimension does not match the loss model");
  }
}

double leader_objective(const TypeDistribution& mu, std::span<const double> x,
                        const StripeProblem& problem) {
  if (x.size() != problem.model.dimension() || !problem.model.domain().contains(x, 1e-12)) {
    throw std::domain_error("decision lies outside the feasible box");
  }
  return problem.leader.evaluate(x) + problem.gamma * wasserstein1(mu, problem.mu0, problem.types);
}

std::vector<double> type_risks(std::span<const double> x, const StripeProblem& problem) {
  const EmpiricalLoss losses(scenario_losses(x, problem.model, problem.scenarios));
  std::vector<double> out;
  out.reserve(problem.types.size());
  for (const auto& s : problem.types.spectra()) out.push_back(spectral_risk(losses, s));
  return out;
}

// ---------------------------------------------------------------------------
// Grid oracle

StripeGrid::StripeGrid(const StripeProblem& problem, std::vector<TypeDistribution> lattice,
                       std::vector<Point> decisions, std::size_t cap)
    : table_([&] {
        if (lattice.empty() || decisions.empty()) {
          throw std::invalid_argument("StripeGrid needs a nonempty lattice and decision grid");
        }
        if (lattice.size() > cap / decisions.size()) {
          throw std::length_error("lattice times decision grid exceeds the configured cap");
        }
        return RiskTable(problem.types, problem.scenarios, problem.model, std::move(decisions));
      }()),
      lattice_(std::move(lattice)) {
  leader_losses_.reserve(table_.points());
  for (const auto& x : table_.grid()) leader_losses_.push_back(problem.leader.evaluate(x));
  for (const auto& mu : lattice_) {
    design_costs_.push_back(problem.gamma * wasserstein1(mu, problem.mu0, problem.types));
    objectives_.push_back(table_.objective(mu.weights()));
    minima_.push_back(*std::min_element(objectives_.back().begin(), objectives_.back().end()));
  }
}

std::vector<std::size_t> StripeGrid::epsilon_set(std::size_t i, double eps) const {
  const auto& values = objectives_[i];
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] <= minima_[i] + eps) out.push_back(j);
  }
  return out;
}

StripeGrid make_stripe_grid(const StripeProblem& problem, std::size_t simplex_steps,
                            std::size_t points_per_axis, std::size_t cap) {
  return StripeGrid(problem, simplex_lattice(problem.types.size(), simplex_steps),
                    problem.model.domain().grid(points_per_axis), cap);
}

double robust_grid_value(const StripeGrid& grid, double eps) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.lattice().size(); ++i) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t j : grid.epsilon_set(i, eps)) worst = std::max(worst, grid.leader_losses()[j]);
    best = std::min(best, grid.design_costs()[i] + worst);
  }
  return best;
}

Equilibrium brute_force_stripe(const StripeProblem& problem, const StripeGrid& grid, double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  std::size_t best_j = 0;
  for (std::size_t i = 0; i < grid.lattice().size(); ++i) {
    for (std::size_t j : grid.epsilon_set(i, eps)) {
      const double value = grid.design_costs()[i] + grid.leader_losses()[j];
      if (value < best) {
        best = value;
        best_i = i;
        best_j = j;
      }
    }
  }
  Equilibrium eq{grid.lattice()[best_i], grid.table().point(best_j)};
  eq.leader_value = leader_objective(eq.mu_hat, eq.x_hat, problem);
  eq.follower_value = grid.objective(best_i)[best_j];
  eq.epsilon = eps;
  eq.feasible = true;
  return eq;
}

VerificationReport verify_equilibrium(const Equilibrium& candidate, const StripeProblem& problem,
                                      double eps, double delta, const StripeGrid& grid,
                                      const SolverSettings& follower) {
  if (!(eps >= 0.0) || !(delta >= 0.0)) {
    throw std::invalid_argument("verification needs nonnegative epsilon and delta");
  }
  VerificationReport r;
  r.epsilon = eps;
  r.delta = delta;
  const auto& mu = candidate.mu_hat;
  r.follower_value = follower_objective(candidate.x_hat, mu, problem.types, problem.scenarios,
                                        problem.model);
  SolverSettings warm = follower;
  warm.initial = candidate.x_hat;
  warm.trace_every = 0;
  const auto sol = solve_follower(mu, problem.types, problem.scenarios, problem.model, warm);
  const auto values = grid.table().objective(mu.weights());
  const double grid_min = *std::min_element(values.begin(), values.end());
  r.follower_optimum = std::min(sol.value, grid_min);
  r.follower_ok = r.follower_value <= r.follower_optimum + eps + 1e-9;

  const double design = problem.gamma * wasserstein1(mu, problem.mu0, problem.types);
  r.candidate_worst = leader_objective(mu, candidate.x_hat, problem);
  for (std::size_t j : grid.table().epsilon_set(values, eps, grid_min)) {
    r.candidate_worst = std::max(r.candidate_worst, design + grid.leader_losses()[j]);
  }
  r.robust_value = robust_grid_value(grid, eps);
  r.required_delta = std::max(0.0, r.candidate_worst - r.robust_value);
  r.leader_ok = r.candidate_worst <= r.robust_value + delta + 1e-9;
  r.certified = r.follower_ok && r.leader_ok;
  return r;
}

// ---------------------------------------------------------------------------
// Penalty solver

Equilibrium solve_stripe(const StripeProblem& problem, const StripeSettings& settings) {
  const double eps = settings.epsilon;
  if (!(eps >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
  if (!(settings.penalty_init > 0.0) || !(settings.penalty_growth > 1.0) ||
      settings.penalty_rounds < 1 || settings.inner_iterations < 1) {
    throw std::invalid_argument("invalid penalty schedule");
  }
  if (!(settings.step_mu > 0.0) || !(settings.step_x > 0.0)) {
    throw std::invalid_argument("step lengths must be positive");
  }
  const double feas_tol = settings.feas_tol < 0.0 ? eps / 10.0 : settings.feas_tol;
  const auto& types = problem.types;
  const auto& model = problem.model;
  const auto& scenarios = problem.scenarios;
  const Box& box = model.domain();
  const double diameter = box.diameter();
  const std::size_t dim = box.dimension();
  // Repairs stop slightly inside the relaxed constraint so that a grid optimum
  // below the solver optimum cannot push them out.
  const double margin = 1e-2 * eps;

  SolverSettings fset = settings.follower;
  fset.trace_every = 0;
  auto solve_at = [&](const TypeDistribution& mu, const Point& warm) {
    fset.initial = warm;
    return solve_follower(mu, types, scenarios, model, fset);
  };

  // Follower optimum moved toward the leader's target while staying in the
  // relaxed optimal set.
  auto repair = [&](const RiskSpectrum& spectrum, const FollowerSolution& sol) {
    if (problem.leader.kind() == LeaderLossKind::zero) return sol.x_star;
    const Point target = box.project(problem.leader.target());
    const double limit = sol.value + eps - margin;
    auto at = [&](double s) {
      Point p(dim);
      for (std::size_t j = 0; j < dim; ++j) p[j] = sol.x_star[j] + s * (target[j] - sol.x_star[j]);
      return box.project(p);
    };
    if (spectral_objective(target, spectrum, model, scenarios) <= limit) return target;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (spectral_objective(at(mid), spectrum, model, scenarios) <= limit) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return at(lo);
  };

  TypeDistribution mu = problem.mu0;
  FollowerSolution sol = solve_at(mu, {});
  Point x = sol.x_star;

  bool found = false;
  double best_value = std::numeric_limits<double>::infinity();
  TypeDistribution best_mu = mu;
  Point best_x = x;
  double best_follower = 0.0;
  auto consider = [&](const TypeDistribution& m, const Point& xc, double follower_value) {
    const double value = leader_objective(m, xc, problem);
    if (value < best_value) {
      best_value = value;
      best_mu = m;
      best_x = xc;
      best_follower = follower_value;
      found = true;
    }
  };

  std::vector<StripeIterate> trace;
  double violation = std::numeric_limits<double>::infinity();
  int rounds = 0;
  for (int round = 0; round < settings.penalty_rounds; ++round) {
    ++rounds;
    const double penalty = settings.penalty_init * std::pow(settings.penalty_growth, round);
    for (int it = 1; it <= settings.inner_iterations; ++it) {
      sol = solve_at(mu, sol.x_star);
      const auto spectrum = equivalent_spectrum(types, mu);
      const auto rho = type_risks(x, problem);
      double value = 0.0;
      for (std::size_t m = 0; m < rho.size(); ++m) value += mu[m] * rho[m];
      const double gap = value - sol.value - eps;
      violation = std::max(0.0, gap);
      if (gap <= 0.0) consider(mu, x, value);
      const Point xr = repair(spectrum, sol);
      consider(mu, xr, spectral_objective(xr, spectrum, model, scenarios));
      trace.push_back({round, it, penalty, leader_objective(mu, x, problem), violation, best_value,
                       std::vector<double>(mu.weights().begin(), mu.weights().end()), x});

      auto g_mu = wasserstein1_subgradient(mu, problem.mu0, types);
      for (double& g : g_mu) g *= problem.gamma;
      Point g_x = problem.leader.subgradient(x);
      if (gap > 0.0) {
        const auto sens = value_sensitivity(sol, mu, types, scenarios, model);
        for (std::size_t m = 0; m < g_mu.size(); ++m) g_mu[m] += penalty * (rho[m] - sens[m]);
        Point gu(dim);
        spectral_objective(x, spectrum, model, scenarios, gu);
        for (std::size_t j = 0; j < dim; ++j) g_x[j] += penalty * gu[j];
      }
      const double shrink = 1.0 / std::sqrt(static_cast<double>(it));
      const double n_mu = euclidean_norm(g_mu);
      if (n_mu > 0.0) {
        std::vector<double> v(mu.weights().begin(), mu.weights().end());
        for (std::size_t m = 0; m < v.size(); ++m) v[m] -= settings.step_mu * shrink * g_mu[m] / n_mu;
        mu = simplex_project(v);
      }
      const double n_x = euclidean_norm(g_x);
      if (n_x > 0.0) {
        for (std::size_t j = 0; j < dim; ++j) {
          x[j] -= settings.step_x * diameter * shrink * g_x[j] / n_x;
        }
        x = box.project(x);
      }
    }
    if (violation <= feas_tol) break;
  }

  Equilibrium eq{found ? best_mu : mu, found ? best_x : x};
  eq.epsilon = eps;
  eq.delta = settings.delta;
  eq.feasible = found;
  eq.leader_value = leader_objective(eq.mu_hat, eq.x_hat, problem);
  eq.follower_value =
      found ? best_follower
            : follower_objective(eq.x_hat, eq.mu_hat, types, scenarios, model);
  eq.trace = std::move(trace);
  std::ostringstream diag;
  diag << "penalty rounds " << rounds << ", final violation " << violation;
  if (!found) diag << ", no feasible iterate";
  if (found && settings.verify) {
    const auto grid = make_stripe_grid(problem, settings.verify_simplex_steps,
                                       settings.verify_points_per_axis);
    eq.verification = verify_equilibrium(eq, problem, eps, settings.delta, grid, settings.follower);
    eq.certified = eq.verification.certified;
    if (!eq.certified) {
      diag << ", verification failed (required delta " << eq.verification.required_delta << ")";
    }
  }
  eq.diagnostics = diag.str();
  return eq;
}

}  // namespace stripe
