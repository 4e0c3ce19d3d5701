#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace stripe {

/// A finite sample of scalar losses with a cached sorted view.
class EmpiricalLoss {
 public:
  /// Throws std::invalid_argument if `values` is empty or holds a non-finite entry.
  explicit EmpiricalLoss(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  /// Nondecreasing permutation of values() (stable sort).
  std::span<const double> sorted() const { return sorted_; }
  double mean() const;

 private:
  std::vector<double> values_;
  std::vector<double> sorted_;
};

/// Nondecreasing right-continuous step density on [0,1).
///
/// Stored as breakpoints tau_1 = 0 < tau_2 < ... < tau_n < 1 and nonnegative
/// jumps a_i; the density on [tau_i, tau_{i+1}) is a_1 + ... + a_i. The
/// constructor enforces sum_i a_i (1 - tau_i) = 1 to within 1e-9.
class RiskSpectrum {
 public:
  RiskSpectrum(std::vector<double> breakpoints, std::vector<double> jumps);

  /// The risk-neutral spectrum (eta == 1).
  static RiskSpectrum flat();

  std::size_t size() const { return breakpoints_.size(); }
  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> jumps() const { return jumps_; }

  /// Spectrum value at tau (tau in [0,1]).
  double value(double tau) const;
  /// Spectrum value at 0, i.e. the first jump.
  double zero_mass() const { return jumps_.front(); }
  /// Integral of the density over [lo, hi].
  double integral(double lo, double hi) const;
  /// Spectrum values at each breakpoint (cumulative jumps).
  std::vector<double> levels() const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> jumps_;
};

struct KusuokaAtom {
  double level;   // tau in [0,1)
  double weight;  // sigma({tau}) >= 0
};

/// Discrete probability measure on [0,1) mixing AV@R levels.
class KusuokaMeasure {
 public:
  /// Throws std::invalid_argument on negative weights, levels outside [0,1),
  /// or total mass off 1 by more than 1e-9.
  explicit KusuokaMeasure(std::vector<KusuokaAtom> atoms);

  std::span<const KusuokaAtom> atoms() const { return atoms_; }
  double total_mass() const;

 private:
  std::vector<KusuokaAtom> atoms_;
};

/// Empirical quantile sorted[floor(alpha * N)] (0-based). Throws
/// std::domain_error for alpha outside [0,1).
double value_at_risk(const EmpiricalLoss& sample, double alpha);

/// Rockafellar-Uryasev value t + E[(Z - t)_+] / (1 - alpha) at t = V@R_alpha.
double average_value_at_risk(const EmpiricalLoss& sample, double alpha);

/// Weight of the k-th order statistic: integral of eta over [k/N, (k+1)/N).
std::vector<double> spectral_weights(std::size_t sample_size,
                                     const RiskSpectrum& spectrum);

double spectral_risk(const EmpiricalLoss& sample, const RiskSpectrum& spectrum);

/// Spectral risk of a finite lottery: outcome `values[k]` has probability
/// `probabilities[k]`. Probabilities must be nonnegative and sum to one.
double spectral_risk(std::span<const double> values,
                     std::span<const double> probabilities,
                     const RiskSpectrum& spectrum);

/// Atoms (tau_i, a_i (1 - tau_i)).
KusuokaMeasure spectrum_to_kusuoka(const RiskSpectrum& spectrum);

double kusuoka_risk(const EmpiricalLoss& sample, const KusuokaMeasure& measure);

/// Step approximation of a nondecreasing target density on the uniform grid
/// tau_i = (i - 1) / n. Jumps are matched at grid points and rescaled to unit
/// mass. Throws std::domain_error if the target decreases between grid points.
RiskSpectrum approximate_spectrum(const std::function<double(double)>& target,
                                  std::size_t n);

/// Largest |∫AV@R dσ1 − ∫AV@R dσ2| over the probe samples. A lower estimate
/// of the pseudo-metric, whose true supremum runs over every achievable loss.
double pseudo_metric_estimate(const KusuokaMeasure& first,
                              const KusuokaMeasure& second,
                              std::span<const EmpiricalLoss> probes);

/// Worst-case expectation over reweightings w with 0 <= w_k <= 1/((1-alpha)N),
/// sum w_k = 1. Filled greedily from the largest loss down.
double dual_representation_check(const EmpiricalLoss& sample, double alpha);

/// Spectrum of the mean-upper-semideviation measure E[Z] + theta E[(Z - EZ)_+]
/// at exceedance probability kappa: 1 - theta*kappa below 1 - kappa and
/// 1 + theta*(1 - kappa) above.
RiskSpectrum mean_semideviation_spectrum(double theta, double kappa);

/// Spectrum of AV@R_alpha: zero below alpha, 1/(1 - alpha) above.
RiskSpectrum average_value_at_risk_spectrum(double alpha);

}  // namespace stripe
