#include "stripe/meta.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace stripe {

namespace {

double softplus_neg(double z) {
  return z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Margins {
  std::vector<double> losses;
  std::vector<double> slopes;  // sigma(-z_k)
  std::vector<std::size_t> order;
};

Margins margins(std::span<const double> x, const ScenarioSet& data) {
  const std::size_t n = x.size();
  Margins out;
  out.losses.resize(data.size());
  out.slopes.resize(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    const auto row = data[k];
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += row[j] * x[j];
    z *= row[n];
    out.losses[k] = softplus_neg(z);
    out.slopes[k] = sigmoid(-z);
  }
  out.order.resize(data.size());
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return out.losses[a] < out.losses[b]; });
  return out;
}

// Spectral risk and its frozen-sort gradient sum_k w_k grad loss_k.
double risk_and_gradient(const Margins& mg, const std::vector<double>& weights,
                         const ScenarioSet& data, std::size_t n, Point& gradient) {
  gradient.assign(n, 0.0);
  double value = 0.0;
  for (std::size_t pos = 0; pos < mg.order.size(); ++pos) {
    const std::size_t k = mg.order[pos];
    const double w = weights[pos];
    value += w * mg.losses[k];
    const auto row = data[k];
    const double c = -w * mg.slopes[k] * row[n];
    for (std::size_t j = 0; j < n; ++j) gradient[j] += c * row[j];
  }
  return value;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

using Objective = std::function<double(std::span<const double>, std::span<double>)>;

struct DescentResult {
  Point x;
  double value;
  int iterations;
  bool converged;
};

DescentResult projected_descent(const Objective& f, const Box& box, Point x,
                                const MetaSettings& settings) {
  const std::size_t n = x.size();
  Point grad(n), trial(n), trial_grad(n);
  double value = f(x, grad);
  double t = 1.0;
  int it = 0;
  bool converged = false;
  for (; it < settings.max_iter; ++it) {
    t *= 2.0;
    bool accepted = false;
    double moved = 0.0;
    for (int halving = 0; halving < 80; ++halving, t *= 0.5) {
      for (std::size_t j = 0; j < n; ++j) trial[j] = x[j] - t * grad[j];
      trial = box.project(trial);
      const double d2 = squared_distance(trial, x);
      if (d2 == 0.0) break;
      const double candidate = f(trial, trial_grad);
      if (candidate <= value - 1e-4 * d2 / t) {
        moved = std::sqrt(d2);
        x.swap(trial);
        grad.swap(trial_grad);
        value = candidate;
        accepted = true;
        break;
      }
    }
    // No descent at any representable step: stationary under the frozen-sort model.
    if (!accepted || moved <= settings.tolerance * (1.0 + norm(x))) {
      converged = true;
      ++it;
      break;
    }
  }
  return {std::move(x), value, it, converged};
}

}  // namespace

void MetaInstance::validate(const ScenarioSet& data) const {
  const std::size_t n = domain.dimension();
  if (mu.size() != types.size())
    throw std::invalid_argument("meta: mu size differs from type count");
  if (!(step >= 0.0) || !std::isfinite(step))
    throw std::invalid_argument("meta: step must be finite and >= 0");
  if (!(guidance_weight >= 0.0) || !std::isfinite(guidance_weight))
    throw std::invalid_argument("meta: guidance_weight must be finite and >= 0");
  if (!reference.empty() && reference.size() != n)
    throw std::invalid_argument("meta: reference dimension differs from domain");
  if (data.dimension() != n + 1)
    throw std::invalid_argument("meta: data rows must hold features plus a label");
  for (std::size_t k = 0; k < data.size(); ++k) {
    const double y = data[k][n];
    if (y != 1.0 && y != -1.0) throw std::invalid_argument("meta: labels must be +1 or -1");
  }
}

TaskEvaluation evaluate_task(std::span<const double> x, std::size_t m, const MetaInstance& inst,
                             const ScenarioSet& data) {
  const std::size_t n = x.size();
  const auto weights = spectral_weights(data.size(), inst.types.spectrum(m));

  TaskEvaluation out;
  const Margins inner = margins(x, data);
  out.inner_risk = risk_and_gradient(inner, weights, data, n, out.inner_gradient);

  out.adapted.resize(n);
  for (std::size_t j = 0; j < n; ++j) out.adapted[j] = x[j] - inst.step * out.inner_gradient[j];

  const Margins outer = margins(out.adapted, data);
  Point outer_gradient;
  out.value = risk_and_gradient(outer, weights, data, n, outer_gradient);

  // (I - step * H) outer_gradient with H = sum_k w_k s_k (1 - s_k) phi_k phi_k^T.
  out.gradient = outer_gradient;
  if (inst.step > 0.0) {
    for (std::size_t pos = 0; pos < inner.order.size(); ++pos) {
      const std::size_t k = inner.order[pos];
      const double s = inner.slopes[k];
      const double c = weights[pos] * s * (1.0 - s);
      if (c == 0.0) continue;
      const auto row = data[k];
      double proj = 0.0;
      for (std::size_t j = 0; j < n; ++j) proj += row[j] * outer_gradient[j];
      for (std::size_t j = 0; j < n; ++j) out.gradient[j] -= inst.step * c * proj * row[j];
    }
  }
  return out;
}

double meta_objective(std::span<const double> x, const MetaInstance& inst,
                      const ScenarioSet& data, std::span<double> gradient) {
  std::fill(gradient.begin(), gradient.end(), 0.0);
  double value = 0.0;
  for (std::size_t m = 0; m < inst.types.size(); ++m) {
    const double weight = inst.mu[m];
    if (weight == 0.0) continue;
    const auto task = evaluate_task(x, m, inst, data);
    value += weight * task.value;
    for (std::size_t j = 0; j < gradient.size(); ++j) gradient[j] += weight * task.gradient[j];
  }
  return value;
}

double meta_objective(std::span<const double> x, const MetaInstance& inst,
                      const ScenarioSet& data) {
  Point scratch(x.size());
  return meta_objective(x, inst, data, scratch);
}

MetaSolution train_meta(const MetaInstance& inst, const ScenarioSet& data,
                        const MetaSettings& settings) {
  inst.validate(data);
  const std::size_t n = inst.domain.dimension();
  const Point reference = inst.reference.empty() ? Point(n, 0.0) : inst.reference;
  Point start = settings.initial.empty() ? inst.domain.center() : settings.initial;
  if (start.size() != n) throw std::invalid_argument("train_meta: initial point has wrong size");
  start = inst.domain.project(start);

  const Objective f = [&](std::span<const double> x, std::span<double> g) {
    double value = meta_objective(x, inst, data, g);
    if (inst.guidance_weight > 0.0) {
      value += inst.guidance_weight * squared_distance(x, reference);
      for (std::size_t j = 0; j < n; ++j) g[j] += 2.0 * inst.guidance_weight * (x[j] - reference[j]);
    }
    return value;
  };
  auto run = projected_descent(f, inst.domain, std::move(start), settings);

  MetaSolution sol;
  sol.x = std::move(run.x);
  sol.iterations = run.iterations;
  sol.converged = run.converged;
  sol.guidance = inst.guidance_weight * squared_distance(sol.x, reference);
  for (std::size_t m = 0; m < inst.types.size(); ++m) {
    const auto task = evaluate_task(sol.x, m, inst, data);
    sol.adapted.push_back(task.value);
    sol.unadapted.push_back(task.inner_risk);
    sol.value += inst.mu[m] * task.value;
  }
  sol.sensitivity = sol.adapted;
  return sol;
}

double resolve_task(const MetaInstance& inst, const ScenarioSet& data, std::size_t m,
                    std::span<const double> start, const MetaSettings& settings) {
  inst.validate(data);
  if (m >= inst.types.size()) throw std::out_of_range("resolve_task: task index out of range");
  MetaInstance single = inst;
  single.mu = TypeDistribution::point_mass(inst.types.size(), m);
  const Objective f = [&](std::span<const double> x, std::span<double> g) {
    return meta_objective(x, single, data, g);
  };
  Point x0 = inst.domain.project(start);
  return projected_descent(f, inst.domain, std::move(x0), settings).value;
}

double adaptation_estimate(double value, std::span<const double> sensitivity,
                           const TypeDistribution& mu, std::size_t m) {
  if (sensitivity.size() != mu.size() || m >= mu.size())
    throw std::invalid_argument("adaptation_estimate: size mismatch");
  double estimate = value;
  for (std::size_t i = 0; i < mu.size(); ++i)
    estimate += sensitivity[i] * ((i == m ? 1.0 : 0.0) - mu[i]);
  return estimate;
}

double adaptation_estimate(const MetaSolution& solution, const TypeDistribution& mu,
                           std::size_t m) {
  return adaptation_estimate(solution.value, solution.sensitivity, mu, m);
}

double adaptation_estimate(const FollowerSolution& solution, const TypeDistribution& mu,
                           const TypeSpace& types, const ScenarioSet& scenarios,
                           const LossModel& model, std::size_t m) {
  const auto g = value_sensitivity(solution, mu, types, scenarios, model);
  return adaptation_estimate(solution.value, g, mu, m);
}

}  // namespace stripe
