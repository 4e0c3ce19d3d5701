#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stripe/risk.hpp"

namespace stripe {

/// Probability vector over the risk-preference types.
class TypeDistribution {
 public:
  /// Throws std::invalid_argument unless weights are nonnegative and sum to 1
  /// within 1e-12.
  explicit TypeDistribution(std::vector<double> weights);

  static TypeDistribution point_mass(std::size_t size, std::size_t index);
  static TypeDistribution uniform(std::size_t size);
  /// r * first + (1 - r) * second, r in [0,1].
  static TypeDistribution mixture(const TypeDistribution& first, const TypeDistribution& second,
                                  double r);

  std::size_t size() const { return weights_.size(); }
  std::span<const double> weights() const { return weights_; }
  double operator[](std::size_t m) const { return weights_[m]; }

 private:
  std::vector<double> weights_;
};

/// Finite type space: strictly increasing real labels, one spectrum per type.
class TypeSpace {
 public:
  TypeSpace(std::vector<double> locations, std::vector<RiskSpectrum> spectra);

  std::size_t size() const { return locations_.size(); }
  std::span<const double> locations() const { return locations_; }
  const std::vector<RiskSpectrum>& spectra() const { return spectra_; }
  const RiskSpectrum& spectrum(std::size_t m) const { return spectra_[m]; }

  /// Sorted union of every type's breakpoints.
  const std::vector<double>& common_grid() const { return grid_; }
  /// Jumps of type m re-expressed on common_grid() (zero where type m has no
  /// breakpoint).
  const std::vector<double>& grid_jumps(std::size_t m) const { return grid_jumps_[m]; }

 private:
  std::vector<double> locations_;
  std::vector<RiskSpectrum> spectra_;
  std::vector<double> grid_;
  std::vector<std::vector<double>> grid_jumps_;
};

/// Mixture spectrum sum_m mu_m eta_m on the common breakpoint grid.
RiskSpectrum equivalent_spectrum(const TypeSpace& types, const TypeDistribution& mu);

/// Exact W1 on the real line with ground metric |theta - theta'|.
double wasserstein1(const TypeDistribution& mu, const TypeDistribution& nu,
                    const TypeSpace& types);

/// Same CDF formula on raw weight vectors (no normalization required).
double wasserstein1(std::span<const double> mu, std::span<const double> nu,
                    std::span<const double> locations);

/// Subgradient of mu -> W1(mu, nu) with sign(0) = 0.
std::vector<double> wasserstein1_subgradient(std::span<const double> mu,
                                             std::span<const double> nu,
                                             std::span<const double> locations);

std::vector<double> wasserstein1_subgradient(const TypeDistribution& mu,
                                             const TypeDistribution& nu,
                                             const TypeSpace& types);

/// Euclidean projection onto the probability simplex.
TypeDistribution simplex_project(std::span<const double> v);

/// Every distribution with weights in {0, 1/steps, ..., 1}, in lexicographic
/// order of the integer counts.
std::vector<TypeDistribution> simplex_lattice(std::size_t size, std::size_t steps);

}  // namespace stripe
