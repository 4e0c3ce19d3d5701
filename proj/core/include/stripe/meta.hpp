#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stripe/follower.hpp"

namespace stripe {

/// Risk-sensitive one-step meta-learning over logistic regression.
///
/// Data rows use the classification layout (features..., label) with labels
/// in {-1, +1}. Each type is a task whose risk is the spectral risk of the
/// per-example log-losses log(1 + exp(-y <phi, x>)). The follower minimizes
/// sum_m mu_m rho_m(losses at x - step * grad rho_m(losses at x)) over the
/// box; the guidance term guidance_weight * |x - reference|^2 is added during
/// training only.
struct MetaInstance {
  TypeSpace types;
  TypeDistribution mu;
  double step = 0.1;
  Box domain;
  Point reference;
  double guidance_weight = 0.0;

  /// Throws std::invalid_argument on shape mismatches, non-binary labels or
  /// step < 0.
  void validate(const ScenarioSet& data) const;
};

/// One task at one parameter: inner risk and (sub)gradient, adapted point
/// and the adapted task value with its gradient through the adaptation.
struct TaskEvaluation {
  double inner_risk = 0.0;
  Point inner_gradient;
  Point adapted;
  double value = 0.0;
  Point gradient;
};

/// Sort weights are frozen at the current ordering of the losses when
/// differentiating, at both the inner and the outer evaluation.
TaskEvaluation evaluate_task(std::span<const double> x, std::size_t m, const MetaInstance& inst,
                             const ScenarioSet& data);

double meta_objective(std::span<const double> x, const MetaInstance& inst,
                      const ScenarioSet& data);

/// Value and gradient of the meta-objective (guidance excluded).
double meta_objective(std::span<const double> x, const MetaInstance& inst,
                      const ScenarioSet& data, std::span<double> gradient);

struct MetaSettings {
  int max_iter = 2000;
  /// Stops when a step moves x by less than tolerance * (1 + |x|).
  double tolerance = 1e-10;
  /// Starting point; box center when empty.
  Point initial;
};

struct MetaSolution {
  Point x;
  /// Meta-objective U* at x (guidance excluded).
  double value = 0.0;
  double guidance = 0.0;
  /// Task values after one adaptation step at x.
  std::vector<double> adapted;
  /// Task risks at x without adaptation.
  std::vector<double> unadapted;
  /// Derivative of the optimal value in mu_m: the adapted task values.
  std::vector<double> sensitivity;
  int iterations = 0;
  bool converged = false;
};

/// Projected gradient descent with Armijo backtracking on the meta-objective
/// plus guidance. `converged` is false when max_iter is reached.
MetaSolution train_meta(const MetaInstance& inst, const ScenarioSet& data,
                        const MetaSettings& settings = {});

/// Minimizes the adapted value of task m alone, starting from `start`. The
/// descent is monotone, so the result never exceeds the start's task value.
double resolve_task(const MetaInstance& inst, const ScenarioSet& data, std::size_t m,
                    std::span<const double> start, const MetaSettings& settings = {});

/// value + sensitivity . (1_m - mu).
double adaptation_estimate(double value, std::span<const double> sensitivity,
                           const TypeDistribution& mu, std::size_t m);

double adaptation_estimate(const MetaSolution& solution, const TypeDistribution& mu,
                           std::size_t m);

/// Same extrapolation for a plain follower solution, with value_sensitivity.
double adaptation_estimate(const FollowerSolution& solution, const TypeDistribution& mu,
                           const TypeSpace& types, const ScenarioSet& scenarios,
                           const LossModel& model, std::size_t m);

}  // namespace stripe
