#include "stripe/type_space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace stripe {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

TypeDistribution::TypeDistribution(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw std::invalid_argument("TypeDistribution needs at least one type");
  double total = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("TypeDistribution weights must be nonnegative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("TypeDistribution weights must sum to 1");
  }
}

TypeDistribution TypeDistribution::point_mass(std::size_t size, std::size_t index) {
  if (index >= size) throw std::invalid_argument("point mass index out of range");
  std::vector<double> w(size, 0.0);
  w[index] = 1.0;
  return TypeDistribution(std::move(w));
}

TypeDistribution TypeDistribution::uniform(std::size_t size) {
  if (size == 0) throw std::invalid_argument("uniform distribution needs a type");
  return TypeDistribution(std::vector<double>(size, 1.0 / static_cast<double>(size)));
}

TypeDistribution TypeDistribution::mixture(const TypeDistribution& first,
                                           const TypeDistribution& second, double r) {
  require_same_size(first.size(), second.size(), "mixture");
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("mixture weight must lie in [0,1]");
  std::vector<double> w(first.size());
  for (std::size_t m = 0; m < w.size(); ++m) w[m] = r * first[m] + (1.0 - r) * second[m];
  return TypeDistribution(std::move(w));
}

TypeSpace::TypeSpace(std::vector<double> locations, std::vector<RiskSpectrum> spectra)
    : locations_(std::move(locations)), spectra_(std::move(spectra)) {
  if (locations_.empty()) throw std::invalid_argument("TypeSpace needs at least one type");
  require_same_size(locations_.size(), spectra_.size(), "TypeSpace");
  for (std::size_t m = 1; m < locations_.size(); ++m) {
    if (!(locations_[m] > locations_[m - 1])) {
      throw std::invalid_argument("TypeSpace locations must be strictly increasing");
    }
  }
  for (const auto& s : spectra_) {
    grid_.insert(grid_.end(), s.breakpoints().begin(), s.breakpoints().end());
  }
  std::sort(grid_.begin(), grid_.end());
  grid_.erase(std::unique(grid_.begin(), grid_.end()), grid_.end());
  grid_jumps_.assign(spectra_.size(), std::vector<double>(grid_.size(), 0.0));
  for (std::size_t m = 0; m < spectra_.size(); ++m) {
    const auto bp = spectra_[m].breakpoints();
    const auto jumps = spectra_[m].jumps();
    for (std::size_t i = 0; i < bp.size(); ++i) {
      const auto it = std::lower_bound(grid_.begin(), grid_.end(), bp[i]);
      grid_jumps_[m][static_cast<std::size_t>(it - grid_.begin())] = jumps[i];
    }
  }
}

RiskSpectrum equivalent_spectrum(const TypeSpace& types, const TypeDistribution& mu) {
  require_same_size(types.size(), mu.size(), "equivalent_spectrum");
  const auto& grid = types.common_grid();
  std::vector<double> jumps(grid.size(), 0.0);
  for (std::size_t m = 0; m < types.size(); ++m) {
    if (mu[m] == 0.0) continue;
    const auto& a = types.grid_jumps(m);
    for (std::size_t i = 0; i < grid.size(); ++i) jumps[i] += mu[m] * a[i];
  }
  return RiskSpectrum(grid, std::move(jumps));
}

double wasserstein1(std::span<const double> mu, std::span<const double> nu,
                    std::span<const double> locations) {
  require_same_size(mu.size(), nu.size(), "wasserstein1");
  require_same_size(mu.size(), locations.size(), "wasserstein1");
  double cdf_gap = 0.0;
  double total = 0.0;
  for (std::size_t m = 0; m + 1 < mu.size(); ++m) {
    cdf_gap += mu[m] - nu[m];
    total += std::abs(cdf_gap) * (locations[m + 1] - locations[m]);
  }
  return total;
}

double wasserstein1(const TypeDistribution& mu, const TypeDistribution& nu,
                    const TypeSpace& types) {
  return wasserstein1(mu.weights(), nu.weights(), types.locations());
}

std::vector<double> wasserstein1_subgradient(std::span<const double> mu,
                                             std::span<const double> nu,
                                             std::span<const double> locations) {
  require_same_size(mu.size(), nu.size(), "wasserstein1_subgradient");
  require_same_size(mu.size(), locations.size(), "wasserstein1_subgradient");
  const std::size_t size = mu.size();
  std::vector<double> segment(size, 0.0);
  double cdf_gap = 0.0;
  for (std::size_t j = 0; j + 1 < size; ++j) {
    cdf_gap += mu[j] - nu[j];
    segment[j] = sign(cdf_gap) * (locations[j + 1] - locations[j]);
  }
  // Component m collects the segments j >= m whose CDF contains mu_m.
  std::vector<double> g(size, 0.0);
  double tail = 0.0;
  for (std::size_t m = size; m-- > 0;) {
    tail += segment[m];
    g[m] = tail;
  }
  return g;
}

std::vector<double> wasserstein1_subgradient(const TypeDistribution& mu,
                                             const TypeDistribution& nu,
                                             const TypeSpace& types) {
  return wasserstein1_subgradient(mu.weights(), nu.weights(), types.locations());
}

TypeDistribution simplex_project(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("simplex_project needs a nonempty vector");
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument("simplex_project needs finite input");
  }
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double running = 0.0;
  double threshold = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    running += sorted[k];
    const double candidate = (running - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) threshold = candidate;
  }
  std::vector<double> out(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::max(v[i] - threshold, 0.0);
    total += out[i];
  }
  // Remove the rounding residue so the result passes the 1e-12 sum check.
  for (double& x : out) x /= total;
  return TypeDistribution(std::move(out));
}

std::vector<TypeDistribution> simplex_lattice(std::size_t size, std::size_t steps) {
  if (size == 0 || steps == 0) throw std::invalid_argument("simplex_lattice needs size, steps >= 1");
  std::vector<TypeDistribution> out;
  std::vector<std::size_t> counts(size, 0);
  const double inv = 1.0 / static_cast<double>(steps);
  std::function<void(std::size_t, std::size_t)> fill = [&](std::size_t m, std::size_t left) {
    if (m + 1 == size) {
      counts[m] = left;
      std::vector<double> w(size);
      for (std::size_t i = 0; i < size; ++i) w[i] = static_cast<double>(counts[i]) * inv;
      // Last weight absorbs rounding so the vector sums to one.
      double head = 0.0;
      for (std::size_t i = 0; i + 1 < size; ++i) head += w[i];
      w[size - 1] = std::max(0.0, 1.0 - head);
      out.emplace_back(std::move(w));
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      counts[m] = c;
      fill(m + 1, left - c);
    }
  };
  fill(0, steps);
  return out;
}

}  // namespace stripe
