#pragma once

// Reference computations used only by the tests. Each one takes a route that
// differs from the library's implementation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <vector>

#include "stripe/risk.hpp"

namespace oracle {

/// inf{z : F_N(z) > alpha} by counting, without sorting.
inline double quantile(const std::vector<double>& z, double alpha) {
  double best = std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(z.size());
  for (double c : z) {
    std::size_t below = 0;
    for (double v : z) below += v <= c;
    if (static_cast<double>(below) / n > alpha) best = std::min(best, c);
  }
  return best;
}

/// Rockafellar-Uryasev objective t + E[(Z - t)_+] / (1 - alpha).
inline double ru_objective(const std::vector<double>& z, double alpha, double t) {
  double tail = 0.0;
  for (double v : z) tail += std::max(v - t, 0.0);
  return t + tail / ((1.0 - alpha) * static_cast<double>(z.size()));
}

/// The RU objective is piecewise linear with kinks at the sample points, so
/// its minimum over the real line is attained at one of them.
inline double avar_by_enumeration(const std::vector<double>& z, double alpha) {
  double best = std::numeric_limits<double>::infinity();
  for (double t : z) best = std::min(best, ru_objective(z, alpha, t));
  return best;
}

/// H(tau) = integral of the step density over [0, tau].
inline double spectrum_antiderivative(const stripe::RiskSpectrum& s, double tau) {
  double h = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    h += s.jumps()[i] * std::max(0.0, tau - s.breakpoints()[i]);
  return h;
}

/// Spectral risk via H differences over the sorted sample.
inline double spectral_by_antiderivative(std::vector<double> z, const stripe::RiskSpectrum& s) {
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double total = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k)
    total += z[k] * (spectrum_antiderivative(s, (k + 1) / n) - spectrum_antiderivative(s, k / n));
  return total;
}

/// W1 on the line by the north-west corner (monotone) coupling.
inline double transport_cost(std::vector<double> mu, std::vector<double> nu,
                             const std::vector<double>& theta) {
  std::size_t i = 0, j = 0;
  double cost = 0.0;
  while (i < mu.size() && j < nu.size()) {
    const double moved = std::min(mu[i], nu[j]);
    cost += moved * std::abs(theta[i] - theta[j]);
    mu[i] -= moved;
    nu[j] -= moved;
    if (mu[i] <= 1e-15) ++i;
    else ++j;
  }
  return cost;
}

/// Simplex projection by bisection on the threshold lambda with
/// sum_i max(v_i - lambda, 0) = 1.
inline std::vector<double> simplex_projection(const std::vector<double>& v) {
  double lo = *std::min_element(v.begin(), v.end()) - 1.0;
  double hi = *std::max_element(v.begin(), v.end());
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double s = 0.0;
    for (double x : v) s += std::max(x - mid, 0.0);
    (s > 1.0 ? lo : hi) = mid;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - 0.5 * (lo + hi), 0.0);
  return out;
}

/// Random step spectrum with `n` breakpoints (first at 0) and unit mass.
inline stripe::RiskSpectrum random_spectrum(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> taus = {0.0};
  while (taus.size() < n) {
    const double t = 0.95 * u(rng);
    if (std::find(taus.begin(), taus.end(), t) == taus.end() && t > 0.0) taus.push_back(t);
  }
  std::sort(taus.begin(), taus.end());
  std::vector<double> jumps(n);
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    jumps[i] = u(rng) + 0.05;
    mass += jumps[i] * (1.0 - taus[i]);
  }
  for (double& a : jumps) a /= mass;
  return stripe::RiskSpectrum(taus, jumps);
}

inline std::vector<double> random_sample(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 2.0);
  std::vector<double> z(n);
  for (double& v : z) v = g(rng);
  return z;
}

inline std::vector<double> random_simplex_point(std::mt19937_64& rng, std::size_t m) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(m);
  double s = 0.0;
  for (double& v : w) s += (v = e(rng));
  for (double& v : w) v /= s;
  return w;
}

}  // namespace oracle
