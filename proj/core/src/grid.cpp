#include "stripe/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stripe {

RiskTable::RiskTable(const TypeSpace& types, const ScenarioSet& scenarios, const LossModel& model,
                     std::vector<Point> grid)
    : grid_(std::move(grid)) {
  if (grid_.empty()) throw std::invalid_argument("RiskTable needs a nonempty grid");
  risks_.assign(types.size(), std::vector<double>(grid_.size(), 0.0));
  std::vector<std::vector<double>> weights;
  for (const auto& s : types.spectra()) weights.push_back(spectral_weights(scenarios.size(), s));
  for (std::size_t j = 0; j < grid_.size(); ++j) {
    if (!model.domain().contains(grid_[j], 1e-12)) {
      throw std::domain_error("grid point lies outside the feasible box");
    }
    const EmpiricalLoss losses(scenario_losses(grid_[j], model, scenarios));
    const auto sorted = losses.sorted();
    for (std::size_t m = 0; m < types.size(); ++m) {
      double total = 0.0;
      for (std::size_t k = 0; k < sorted.size(); ++k) total += weights[m][k] * sorted[k];
      risks_[m][j] = total;
    }
  }
}

std::vector<double> RiskTable::objective(std::span<const double> mu) const {
  if (mu.size() != risks_.size()) throw std::invalid_argument("RiskTable: dimension mismatch");
  std::vector<double> out(grid_.size(), 0.0);
  for (std::size_t m = 0; m < risks_.size(); ++m) {
    if (mu[m] == 0.0) continue;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += mu[m] * risks_[m][j];
  }
  return out;
}

double RiskTable::minimum(std::span<const double> mu) const {
  const auto values = objective(mu);
  return *std::min_element(values.begin(), values.end());
}

std::vector<std::size_t> RiskTable::epsilon_set(std::span<const double> mu, double eps) const {
  const auto values = objective(mu);
  return epsilon_set(values, eps, std::numeric_limits<double>::infinity());
}

std::vector<std::size_t> RiskTable::epsilon_set(const std::vector<double>& values, double eps,
                                                double reference) const {
  const double best = std::min(reference, *std::min_element(values.begin(), values.end()));
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] <= best + eps) out.push_back(j);
  }
  return out;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double point_set_distance(std::span<const double> a, const std::vector<Point>& set) {
  if (set.empty()) throw std::invalid_argument("distance to an empty set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : set) best = std::min(best, distance(a, b));
  return best;
}

}  // namespace stripe
