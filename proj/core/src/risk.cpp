#include "stripe/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace stripe {

namespace {

constexpr double kMassTolerance = 1e-9;

void require_level(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw std::domain_error("risk level must lie in [0,1), got " + std::to_string(alpha));
  }
}

std::size_t quantile_index(std::size_t n, double alpha) {
  const auto k = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n)));
  return std::min(k, n - 1);
}

// Antiderivative H(tau) = sum_j a_j (tau - tau_j)_+ evaluated on an increasing
// list of abscissae with a single sweep over the breakpoints.
std::vector<double> antiderivative(const RiskSpectrum& spectrum, std::span<const double> taus) {
  const auto bp = spectrum.breakpoints();
  const auto jumps = spectrum.jumps();
  std::vector<double> out(taus.size());
  double level = 0.0;
  double moment = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    while (j < bp.size() && bp[j] <= taus[i]) {
      level += jumps[j];
      moment += jumps[j] * bp[j];
      ++j;
    }
    out[i] = level * taus[i] - moment;
  }
  return out;
}

}  // namespace

EmpiricalLoss::EmpiricalLoss(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw std::invalid_argument("EmpiricalLoss requires at least one value");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("EmpiricalLoss values must be finite");
  }
  sorted_ = values_;
  std::stable_sort(sorted_.begin(), sorted_.end());
}

double EmpiricalLoss::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

RiskSpectrum::RiskSpectrum(std::vector<double> breakpoints, std::vector<double> jumps)
    : breakpoints_(std::move(breakpoints)), jumps_(std::move(jumps)) {
  if (breakpoints_.empty() || breakpoints_.size() != jumps_.size()) {
    throw std::invalid_argument("RiskSpectrum needs matching, nonempty breakpoints and jumps");
  }
  if (breakpoints_.front() != 0.0) {
    throw std::invalid_argument("RiskSpectrum first breakpoint must be 0");
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    const double tau = breakpoints_[i];
    const double a = jumps_[i];
    if (!std::isfinite(tau) || tau < 0.0 || tau >= 1.0) {
      throw std::invalid_argument("RiskSpectrum breakpoints must lie in [0,1)");
    }
    if (i > 0 && !(tau > breakpoints_[i - 1])) {
      throw std::invalid_argument("RiskSpectrum breakpoints must be strictly increasing");
    }
    if (!std::isfinite(a) || a < 0.0) {
      throw std::invalid_argument("RiskSpectrum jumps must be finite and nonnegative");
    }
    mass += a * (1.0 - tau);
  }
  if (std::abs(mass - 1.0) > kMassTolerance) {
    throw std::invalid_argument("RiskSpectrum must integrate to 1, got " + std::to_string(mass));
  }
}

RiskSpectrum RiskSpectrum::flat() { return RiskSpectrum({0.0}, {1.0}); }

double RiskSpectrum::value(double tau) const {
  double v = 0.0;
  for (std::size_t i = 0; i < breakpoints_.size() && breakpoints_[i] <= tau; ++i) v += jumps_[i];
  return v;
}

double RiskSpectrum::integral(double lo, double hi) const {
  if (hi <= lo) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    const double start = std::max(lo, breakpoints_[i]);
    if (hi > start) total += jumps_[i] * (hi - start);
  }
  return total;
}

std::vector<double> RiskSpectrum::levels() const {
  std::vector<double> out(jumps_.size());
  std::partial_sum(jumps_.begin(), jumps_.end(), out.begin());
  return out;
}

KusuokaMeasure::KusuokaMeasure(std::vector<KusuokaAtom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("KusuokaMeasure needs at least one atom");
  for (const auto& atom : atoms_) {
    if (!(atom.level >= 0.0 && atom.level < 1.0)) {
      throw std::invalid_argument("Kusuoka atom levels must lie in [0,1)");
    }
    if (!std::isfinite(atom.weight) || atom.weight < 0.0) {
      throw std::invalid_argument("Kusuoka atom weights must be nonnegative");
    }
  }
  if (std::abs(total_mass() - 1.0) > kMassTolerance) {
    throw std::invalid_argument("KusuokaMeasure must have unit mass");
  }
}

double KusuokaMeasure::total_mass() const {
  double mass = 0.0;
  for (const auto& atom : atoms_) mass += atom.weight;
  return mass;
}

double value_at_risk(const EmpiricalLoss& sample, double alpha) {
  require_level(alpha);
  return sample.sorted()[quantile_index(sample.size(), alpha)];
}

double average_value_at_risk(const EmpiricalLoss& sample, double alpha) {
  const double t = value_at_risk(sample, alpha);
  double excess = 0.0;
  for (double z : sample.values()) excess += std::max(z - t, 0.0);
  return t + excess / ((1.0 - alpha) * static_cast<double>(sample.size()));
}

std::vector<double> spectral_weights(std::size_t sample_size, const RiskSpectrum& spectrum) {
  if (sample_size == 0) throw std::invalid_argument("spectral_weights needs a positive sample size");
  std::vector<double> grid(sample_size + 1);
  for (std::size_t k = 0; k <= sample_size; ++k) {
    grid[k] = static_cast<double>(k) / static_cast<double>(sample_size);
  }
  const auto h = antiderivative(spectrum, grid);
  std::vector<double> weights(sample_size);
  for (std::size_t k = 0; k < sample_size; ++k) weights[k] = h[k + 1] - h[k];
  return weights;
}

double spectral_risk(const EmpiricalLoss& sample, const RiskSpectrum& spectrum) {
  const auto weights = spectral_weights(sample.size(), spectrum);
  const auto sorted = sample.sorted();
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) total += weights[k] * sorted[k];
  return total;
}

double spectral_risk(std::span<const double> values, std::span<const double> probabilities,
                     const RiskSpectrum& spectrum) {
  if (values.empty() || values.size() != probabilities.size()) {
    throw std::invalid_argument("lottery values and probabilities must match and be nonempty");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> cdf(values.size() + 1, 0.0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double p = probabilities[order[k]];
    if (!(p >= 0.0)) throw std::invalid_argument("lottery probabilities must be nonnegative");
    cdf[k + 1] = cdf[k] + p;
  }
  if (std::abs(cdf.back() - 1.0) > 1e-9) {
    throw std::invalid_argument("lottery probabilities must sum to one");
  }
  for (double& c : cdf) c = std::min(c, 1.0);
  cdf.back() = 1.0;
  const auto h = antiderivative(spectrum, cdf);
  double total = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) total += (h[k + 1] - h[k]) * values[order[k]];
  return total;
}

KusuokaMeasure spectrum_to_kusuoka(const RiskSpectrum& spectrum) {
  std::vector<KusuokaAtom> atoms;
  atoms.reserve(spectrum.size());
  const auto bp = spectrum.breakpoints();
  const auto jumps = spectrum.jumps();
  for (std::size_t i = 0; i < bp.size(); ++i) atoms.push_back({bp[i], jumps[i] * (1.0 - bp[i])});
  return KusuokaMeasure(std::move(atoms));
}

double kusuoka_risk(const EmpiricalLoss& sample, const KusuokaMeasure& measure) {
  double total = 0.0;
  for (const auto& atom : measure.atoms()) {
    if (atom.weight == 0.0) continue;
    total += atom.weight * average_value_at_risk(sample, atom.level);
  }
  return total;
}

RiskSpectrum approximate_spectrum(const std::function<double(double)>& target, std::size_t n) {
  if (n == 0) throw std::invalid_argument("approximate_spectrum needs n >= 1");
  std::vector<double> taus(n);
  std::vector<double> jumps(n);
  double previous = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    taus[i] = static_cast<double>(i) / static_cast<double>(n);
    const double v = target(taus[i]);
    if (!std::isfinite(v)) throw std::domain_error("spectrum target must be finite");
    const double jump = v - previous;
    if (jump < -1e-12 * std::max(1.0, std::abs(v))) {
      throw std::domain_error("spectrum target decreases at tau = " + std::to_string(taus[i]));
    }
    jumps[i] = std::max(jump, 0.0);
    previous = v;
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) mass += jumps[i] * (1.0 - taus[i]);
  if (!(mass > 0.0)) throw std::domain_error("spectrum target has no mass");
  for (double& a : jumps) a /= mass;
  return RiskSpectrum(std::move(taus), std::move(jumps));
}

double pseudo_metric_estimate(const KusuokaMeasure& first, const KusuokaMeasure& second,
                              std::span<const EmpiricalLoss> probes) {
  if (probes.empty()) throw std::invalid_argument("pseudo_metric_estimate needs probe samples");
  double best = 0.0;
  for (const auto& probe : probes) {
    best = std::max(best, std::abs(kusuoka_risk(probe, first) - kusuoka_risk(probe, second)));
  }
  return best;
}

double dual_representation_check(const EmpiricalLoss& sample, double alpha) {
  require_level(alpha);
  const auto sorted = sample.sorted();
  const double cap = 1.0 / ((1.0 - alpha) * static_cast<double>(sample.size()));
  double remaining = 1.0;
  double total = 0.0;
  for (std::size_t k = sorted.size(); k-- > 0 && remaining > 0.0;) {
    const double w = std::min(cap, remaining);
    total += w * sorted[k];
    remaining -= w;
  }
  return total;
}

RiskSpectrum mean_semideviation_spectrum(double theta, double kappa) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw std::invalid_argument("semideviation weight must lie in [0,1]");
  }
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw std::invalid_argument("exceedance probability must lie in (0,1)");
  }
  return RiskSpectrum({0.0, 1.0 - kappa}, {1.0 - theta * kappa, theta});
}

RiskSpectrum average_value_at_risk_spectrum(double alpha) {
  require_level(alpha);
  if (alpha == 0.0) return RiskSpectrum::flat();
  return RiskSpectrum({0.0, alpha}, {0.0, 1.0 / (1.0 - alpha)});
}

}  // namespace stripe
