#pragma once

#include <cstddef>
#include <vector>

#include "stripe/follower.hpp"

namespace stripe {

/// Per-type risks rho_m(x_j) on a fixed decision grid. Since the follower
/// objective is linear in mu, U_mu(x_j) = sum_m mu_m rho_m(x_j) is then a
/// cheap weighted sum for any mu.
class RiskTable {
 public:
  RiskTable(const TypeSpace& types, const ScenarioSet& scenarios, const LossModel& model,
            std::vector<Point> grid);

  std::size_t types() const { return risks_.size(); }
  std::size_t points() const { return grid_.size(); }
  const std::vector<Point>& grid() const { return grid_; }
  const Point& point(std::size_t j) const { return grid_[j]; }
  double risk(std::size_t m, std::size_t j) const { return risks_[m][j]; }

  /// U_mu at every grid point.
  std::vector<double> objective(std::span<const double> mu) const;
  double minimum(std::span<const double> mu) const;
  /// Indices j with U_mu(x_j) <= reference + eps, where reference is the grid
  /// minimum unless a smaller value is supplied.
  std::vector<std::size_t> epsilon_set(std::span<const double> mu, double eps) const;
  std::vector<std::size_t> epsilon_set(const std::vector<double>& values, double eps,
                                       double reference) const;

 private:
  std::vector<Point> grid_;
  std::vector<std::vector<double>> risks_;
};

double distance(std::span<const double> a, std::span<const double> b);

/// D(a, B) = min_b |a - b|.
double point_set_distance(std::span<const double> a, const std::vector<Point>& set);

}  // namespace stripe
