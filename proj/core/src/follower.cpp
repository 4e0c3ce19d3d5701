#include "stripe/follower.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace stripe {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// log(1 + exp(-z)) without overflow.
double log1p_exp_neg(double z) {
  return z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void require_inside(const Box& box, std::span<const double> x) {
  if (x.size() != box.dimension() || !box.contains(x, 1e-12)) {
    throw std::domain_error("decision lies outside the feasible box");
  }
}

// Value and subgradient of sum_k w_k z_(k) given precomputed order weights.
double weighted_objective(std::span<const double> x, std::span<const double> weights,
                          const LossModel& model, const ScenarioSet& scenarios,
                          std::span<double> subgradient) {
  const std::size_t n = scenarios.size();
  const auto losses = scenario_losses(x, model, scenarios);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return losses[a] < losses[b]; });
  double value = 0.0;
  for (std::size_t k = 0; k < n; ++k) value += weights[k] * losses[order[k]];
  if (!subgradient.empty()) {
    std::fill(subgradient.begin(), subgradient.end(), 0.0);
    std::vector<double> g(model.dimension());
    for (std::size_t k = 0; k < n; ++k) {
      if (weights[k] == 0.0) continue;
      model.subgradient(x, scenarios[order[k]], g);
      for (std::size_t j = 0; j < g.size(); ++j) subgradient[j] += weights[k] * g[j];
    }
  }
  return value;
}

// Golden-section minimization of a convex function of one variable on [lo, hi].
template <typename F>
std::pair<double, double> golden_section(F&& f, double lo, double hi) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  double best_x = fc <= fd ? c : d;
  double best_f = std::min(fc, fd);
  for (double edge : {lo, hi}) {
    const double fe = f(edge);
    if (fe < best_f) {
      best_f = fe;
      best_x = edge;
    }
  }
  return {best_x, best_f};
}

// Min-norm point of the convex hull of `g` by projected gradient on the
// simplex of weights.
Point min_norm_combination(const std::vector<Point>& g) {
  const std::size_t m = g.size(), dim = g.front().size();
  double lip = 0.0;
  for (const auto& v : g) lip += dot(v, v);
  if (lip == 0.0) return Point(dim, 0.0);
  std::vector<double> lambda(m, 1.0 / static_cast<double>(m));
  Point mix(dim);
  for (int it = 0; it < 300; ++it) {
    std::fill(mix.begin(), mix.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < dim; ++j) mix[j] += lambda[i] * g[i][j];
    std::vector<double> step(m);
    for (std::size_t i = 0; i < m; ++i) step[i] = lambda[i] - dot(g[i], mix) / lip;
    const auto next = simplex_project(step);
    lambda.assign(next.weights().begin(), next.weights().end());
  }
  std::fill(mix.begin(), mix.end(), 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < dim; ++j) mix[j] += lambda[i] * g[i][j];
  return mix;
}

// Gradient sampling: near a kink the min-norm element of subgradients drawn
// around x is a descent direction even where coordinate searches stall.
template <typename F>
void sampled_descent(Point& x, double& value, const Box& box, F&& value_and_subgradient) {
  const std::size_t dim = x.size();
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double floor = 1e-12 * box.diameter();
  double radius = 1e-3 * box.diameter();
  Point probe(dim);
  for (int round = 0; round < 500 && radius > floor; ++round) {
    std::vector<Point> g(2 * dim + 2, Point(dim));
    value_and_subgradient(x, g[0]);
    for (std::size_t i = 1; i < g.size(); ++i) {
      Point u(dim);
      for (auto& c : u) c = gauss(rng);
      const double scale = radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim)) / norm(u);
      for (std::size_t j = 0; j < dim; ++j) probe[j] = x[j] + scale * u[j];
      value_and_subgradient(box.project(probe), g[i]);
    }
    Point d = min_norm_combination(g);
    const double dn = norm(d);
    if (dn <= 1e-14) {
      radius /= 10.0;
      continue;
    }
    double reach = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < dim; ++j) {
      d[j] = -d[j] / dn;
      if (d[j] > 0.0) reach = std::min(reach, (box.upper[j] - x[j]) / d[j]);
      if (d[j] < 0.0) reach = std::min(reach, (box.lower[j] - x[j]) / d[j]);
    }
    if (!(reach > 0.0)) {
      radius /= 10.0;
      continue;
    }
    auto line = [&](double t) {
      for (std::size_t j = 0; j < dim; ++j) probe[j] = x[j] + t * d[j];
      return value_and_subgradient(box.project(probe), {});
    };
    const auto [t, v] = golden_section(line, 0.0, reach);
    if (v < value) {
      for (std::size_t j = 0; j < dim; ++j) probe[j] = x[j] + t * d[j];
      x = box.project(probe);
      value = v;
    } else {
      radius /= 10.0;
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Box

Box::Box(std::vector<double> lo, std::vector<double> hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.empty() || lower.size() != upper.size()) {
    throw std::invalid_argument("Box bounds must be nonempty and of equal length");
  }
  for (std::size_t j = 0; j < lower.size(); ++j) {
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]) || lower[j] > upper[j]) {
      throw std::invalid_argument("Box requires finite lower <= upper");
    }
  }
}

bool Box::contains(std::span<const double> x, double slack) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] >= lower[j] - slack && x[j] <= upper[j] + slack)) return false;
  }
  return true;
}

Point Box::project(std::span<const double> x) const {
  Point out(x.begin(), x.end());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::clamp(out[j], lower[j], upper[j]);
  return out;
}

Point Box::center() const {
  Point c(lower.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = 0.5 * (lower[j] + upper[j]);
  return c;
}

double Box::diameter() const {
  double s = 0.0;
  for (std::size_t j = 0; j < lower.size(); ++j) s += (upper[j] - lower[j]) * (upper[j] - lower[j]);
  return std::sqrt(s);
}

std::vector<Point> Box::grid(std::size_t points_per_axis) const {
  if (points_per_axis == 0) throw std::invalid_argument("grid needs at least one point per axis");
  const std::size_t dim = dimension();
  std::size_t total = 1;
  for (std::size_t j = 0; j < dim; ++j) total *= points_per_axis;
  std::vector<Point> out;
  out.reserve(total);
  std::vector<std::size_t> idx(dim, 0);
  for (std::size_t count = 0; count < total; ++count) {
    Point p(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      p[j] = points_per_axis == 1
                 ? 0.5 * (lower[j] + upper[j])
                 : lower[j] + (upper[j] - lower[j]) * static_cast<double>(idx[j]) /
                                  static_cast<double>(points_per_axis - 1);
    }
    out.push_back(std::move(p));
    for (std::size_t j = dim; j-- > 0;) {
      if (++idx[j] < points_per_axis) break;
      idx[j] = 0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// LossModel

const char* to_string(LossKind kind) {
  switch (kind) {
    case LossKind::linear: return "linear";
    case LossKind::quadratic: return "quadratic";
    case LossKind::hinge: return "hinge";
    case LossKind::logistic: return "logistic";
    case LossKind::newsvendor: return "newsvendor";
  }
  return "unknown";
}

LossKind loss_kind_from_string(const std::string& name) {
  for (auto kind : {LossKind::linear, LossKind::quadratic, LossKind::hinge, LossKind::logistic,
                    LossKind::newsvendor}) {
    if (name == to_string(kind)) return kind;
  }
  throw std::invalid_argument("unknown loss kind '" + name + "'");
}

LossModel LossModel::linear(Box domain) { return LossModel(LossKind::linear, std::move(domain)); }
LossModel LossModel::quadratic(Box domain) {
  return LossModel(LossKind::quadratic, std::move(domain));
}
LossModel LossModel::hinge(Box domain) { return LossModel(LossKind::hinge, std::move(domain)); }
LossModel LossModel::logistic(Box domain) {
  return LossModel(LossKind::logistic, std::move(domain));
}
LossModel LossModel::newsvendor(Box domain, double overage_cost, double underage_cost) {
  if (!(overage_cost >= 0.0 && underage_cost >= 0.0)) {
    throw std::invalid_argument("newsvendor costs must be nonnegative");
  }
  LossModel m(LossKind::newsvendor, std::move(domain));
  m.overage_ = overage_cost;
  m.underage_ = underage_cost;
  return m;
}

LossModel LossModel::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw std::invalid_argument("loss scale factor must be positive");
  }
  LossModel m = *this;
  m.scale_ *= factor;
  return m;
}

std::size_t LossModel::scenario_dimension() const {
  switch (kind_) {
    case LossKind::hinge:
    case LossKind::logistic: return dimension() + 1;
    default: return dimension();
  }
}

double LossModel::evaluate(std::span<const double> x, std::span<const double> xi) const {
  const std::size_t n = dimension();
  switch (kind_) {
    case LossKind::linear: return scale_ * dot(x, xi.first(n));
    case LossKind::quadratic: {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += (x[j] - xi[j]) * (x[j] - xi[j]);
      return scale_ * s;
    }
    case LossKind::hinge: return scale_ * std::max(0.0, 1.0 - xi[n] * dot(x, xi.first(n)));
    case LossKind::logistic: return scale_ * log1p_exp_neg(xi[n] * dot(x, xi.first(n)));
    case LossKind::newsvendor: {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        s += overage_ * std::max(x[j] - xi[j], 0.0) + underage_ * std::max(xi[j] - x[j], 0.0);
      }
      return scale_ * s;
    }
  }
  return 0.0;
}

void LossModel::subgradient(std::span<const double> x, std::span<const double> xi,
                            std::span<double> out) const {
  const std::size_t n = dimension();
  switch (kind_) {
    case LossKind::linear:
      for (std::size_t j = 0; j < n; ++j) out[j] = scale_ * xi[j];
      return;
    case LossKind::quadratic:
      for (std::size_t j = 0; j < n; ++j) out[j] = scale_ * 2.0 * (x[j] - xi[j]);
      return;
    case LossKind::hinge: {
      const double y = xi[n];
      const bool active = 1.0 - y * dot(x, xi.first(n)) > 0.0;
      for (std::size_t j = 0; j < n; ++j) out[j] = active ? -scale_ * y * xi[j] : 0.0;
      return;
    }
    case LossKind::logistic: {
      const double y = xi[n];
      const double coef = -scale_ * y * sigmoid(-y * dot(x, xi.first(n)));
      for (std::size_t j = 0; j < n; ++j) out[j] = coef * xi[j];
      return;
    }
    case LossKind::newsvendor:
      for (std::size_t j = 0; j < n; ++j) {
        out[j] = x[j] > xi[j] ? scale_ * overage_ : (x[j] < xi[j] ? -scale_ * underage_ : 0.0);
      }
      return;
  }
}

Point LossModel::subgradient(std::span<const double> x, std::span<const double> xi) const {
  Point g(dimension());
  subgradient(x, xi, g);
  return g;
}

// ---------------------------------------------------------------------------
// ScenarioSet

const char* to_string(ScenarioSpec::Kind kind) {
  switch (kind) {
    case ScenarioSpec::Kind::normal: return "normal";
    case ScenarioSpec::Kind::uniform: return "uniform";
    case ScenarioSpec::Kind::exponential: return "exponential";
    case ScenarioSpec::Kind::classification: return "classification";
  }
  return "unknown";
}

ScenarioSpec::Kind scenario_kind_from_string(const std::string& name) {
  using K = ScenarioSpec::Kind;
  for (auto kind : {K::normal, K::uniform, K::exponential, K::classification}) {
    if (name == to_string(kind)) return kind;
  }
  throw std::invalid_argument("unknown scenario kind '" + name + "'");
}

ScenarioSet::ScenarioSet(std::vector<Point> samples, std::uint64_t seed)
    : samples_(std::move(samples)), seed_(seed) {
  if (samples_.empty()) throw std::invalid_argument("ScenarioSet needs at least one sample");
  const std::size_t dim = samples_.front().size();
  if (dim == 0) throw std::invalid_argument("scenarios must have positive dimension");
  for (const auto& s : samples_) {
    if (s.size() != dim) throw std::invalid_argument("scenarios must share one dimension");
    for (double v : s) {
      if (!std::isfinite(v)) throw std::invalid_argument("scenario entries must be finite");
    }
  }
}

ScenarioSet ScenarioSet::generate(const ScenarioSpec& spec, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("scenario count must be positive");
  const std::size_t dim = spec.dimension;
  if (dim == 0) throw std::invalid_argument("scenario dimension must be positive");
  auto param = [&](const std::vector<double>& v, std::size_t j, double fallback) {
    if (v.empty()) return fallback;
    if (v.size() == 1) return v[0];
    if (v.size() != dim) throw std::invalid_argument("scenario parameter length mismatch");
    return v[j];
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> samples;
  samples.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Point xi;
    switch (spec.kind) {
      case ScenarioSpec::Kind::normal:
        for (std::size_t j = 0; j < dim; ++j) {
          xi.push_back(param(spec.location, j, 0.0) + param(spec.scale, j, 1.0) * gauss(rng));
        }
        break;
      case ScenarioSpec::Kind::uniform:
        for (std::size_t j = 0; j < dim; ++j) {
          const double lo = param(spec.location, j, 0.0);
          const double hi = param(spec.scale, j, 1.0);
          xi.push_back(lo + (hi - lo) * unit(rng));
        }
        break;
      case ScenarioSpec::Kind::exponential:
        for (std::size_t j = 0; j < dim; ++j) {
          const double u = unit(rng);
          xi.push_back(param(spec.location, j, 0.0) - param(spec.scale, j, 1.0) * std::log1p(-u));
        }
        break;
      case ScenarioSpec::Kind::classification: {
        double margin = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
          const double f = param(spec.location, j, 0.0) + param(spec.scale, j, 1.0) * gauss(rng);
          xi.push_back(f);
          margin += param(spec.weights, j, 1.0) * f;
        }
        margin += spec.label_noise * gauss(rng);
        xi.push_back(margin >= 0.0 ? 1.0 : -1.0);
        break;
      }
    }
    samples.push_back(std::move(xi));
  }
  return ScenarioSet(std::move(samples), seed);
}

void ScenarioSet::write_csv(std::ostream& out) const {
  out << "# seed=" << seed_ << '\n';
  for (std::size_t j = 0; j < dimension(); ++j) out << (j ? "," : "") << "xi_" << j;
  out << '\n';
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  for (const auto& s : samples_) {
    for (std::size_t j = 0; j < s.size(); ++j) out << (j ? "," : "") << s[j];
    out << '\n';
  }
  out.precision(old);
}

ScenarioSet ScenarioSet::read_csv(std::istream& in) {
  std::uint64_t seed = 0;
  std::vector<Point> samples;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("seed=");
      if (pos != std::string::npos) seed = std::stoull(line.substr(pos + 5));
      continue;
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    Point row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t used = 0;
      row.push_back(std::stod(cell, &used));
      if (used == 0) throw std::invalid_argument("malformed scenario cell '" + cell + "'");
    }
    samples.push_back(std::move(row));
  }
  return ScenarioSet(std::move(samples), seed);
}

// ---------------------------------------------------------------------------
// Follower problem

std::vector<double> scenario_losses(std::span<const double> x, const LossModel& model,
                                    const ScenarioSet& scenarios) {
  if (scenarios.dimension() != model.scenario_dimension()) {
    throw std::invalid_argument("scenario dimension does not match the loss model");
  }
  std::vector<double> losses(scenarios.size());
  for (std::size_t k = 0; k < scenarios.size(); ++k) losses[k] = model.evaluate(x, scenarios[k]);
  return losses;
}

double spectral_objective(std::span<const double> x, const RiskSpectrum& spectrum,
                          const LossModel& model, const ScenarioSet& scenarios) {
  return spectral_risk(EmpiricalLoss(scenario_losses(x, model, scenarios)), spectrum);
}

double spectral_objective(std::span<const double> x, const RiskSpectrum& spectrum,
                          const LossModel& model, const ScenarioSet& scenarios,
                          std::span<double> subgradient) {
  const auto weights = spectral_weights(scenarios.size(), spectrum);
  return weighted_objective(x, weights, model, scenarios, subgradient);
}

double follower_objective(std::span<const double> x, const TypeDistribution& mu,
                          const TypeSpace& types, const ScenarioSet& scenarios,
                          const LossModel& model) {
  require_inside(model.domain(), x);
  return spectral_objective(x, equivalent_spectrum(types, mu), model, scenarios);
}

FollowerSolution solve_follower(const RiskSpectrum& spectrum, const ScenarioSet& scenarios,
                                const LossModel& model, const SolverSettings& settings) {
  const Box& box = model.domain();
  const std::size_t dim = box.dimension();
  const auto weights = spectral_weights(scenarios.size(), spectrum);
  auto value_at = [&](std::span<const double> x) {
    return weighted_objective(x, weights, model, scenarios, {});
  };

  FollowerSolution sol;
  Point x = settings.initial.empty() ? box.center() : box.project(settings.initial);
  Point g(dim);
  Point best = x;
  double best_value = weighted_objective(x, weights, model, scenarios, g);
  Point average = x;
  double weight_sum = 0.0;
  const double c = settings.step_scale * box.diameter();
  bool stalled = box.diameter() == 0.0;
  double window_start_value = best_value;
  int k = 0;

  for (k = 1; k <= settings.max_iter && !stalled; ++k) {
    const double value = weighted_objective(x, weights, model, scenarios, g);
    if (value < best_value) {
      best_value = value;
      best = x;
    }
    const double gn = norm(g);
    const double step = c / std::sqrt(static_cast<double>(k));
    sol.final_step = step;
    if (settings.trace_every > 0 && (k % settings.trace_every == 1 || k == 1)) {
      sol.trace.push_back({k, step, value, best_value});
    }
    if (gn == 0.0) {
      stalled = true;
      break;
    }
    for (std::size_t j = 0; j < dim; ++j) x[j] -= step * g[j] / gn;
    x = box.project(x);
    weight_sum += step;
    for (std::size_t j = 0; j < dim; ++j) average[j] += (step / weight_sum) * (x[j] - average[j]);
    if (k % 50 == 0) {
      const double avg_value = value_at(average);
      if (avg_value < best_value) {
        best_value = avg_value;
        best = average;
      }
    }
    if (settings.stall_window > 0 && k % settings.stall_window == 0) {
      if (window_start_value - best_value <= settings.tolerance * (1.0 + std::abs(best_value))) {
        stalled = true;
      }
      window_start_value = best_value;
    }
  }
  sol.iterations = std::min(k, settings.max_iter);
  bool converged = stalled;

  if (settings.polish && box.diameter() > 0.0) {
    converged = false;
    for (int sweep = 0; sweep < settings.polish_sweeps; ++sweep) {
      const double before = best_value;
      for (std::size_t j = 0; j < dim; ++j) {
        if (box.upper[j] == box.lower[j]) continue;
        Point probe = best;
        auto line = [&](double t) {
          probe[j] = t;
          return value_at(probe);
        };
        const auto [t, v] = golden_section(line, box.lower[j], box.upper[j]);
        if (v < best_value) {
          best_value = v;
          best[j] = t;
        }
      }
      if (settings.trace_every > 0) {
        sol.trace.push_back({sol.iterations + sweep + 1, 0.0, best_value, best_value});
      }
      if (before - best_value <= settings.tolerance * (1.0 + std::abs(best_value))) {
        converged = true;
        break;
      }
    }
  }

  if (settings.polish && dim > 1 && box.diameter() > 0.0) {
    sampled_descent(best, best_value, box, [&](std::span<const double> p, std::span<double> sub) {
      return weighted_objective(p, weights, model, scenarios, sub);
    });
  }

  sol.x_star = best;
  sol.value = value_at(best);
  sol.converged = converged;
  const EmpiricalLoss losses(scenario_losses(best, model, scenarios));
  sol.breakpoints.assign(spectrum.breakpoints().begin(), spectrum.breakpoints().end());
  for (double tau : sol.breakpoints) sol.t_star.push_back(value_at_risk(losses, tau));
  return sol;
}

FollowerSolution solve_follower(const TypeDistribution& mu, const TypeSpace& types,
                                const ScenarioSet& scenarios, const LossModel& model,
                                const SolverSettings& settings) {
  return solve_follower(equivalent_spectrum(types, mu), scenarios, model, settings);
}

std::vector<Point> epsilon_optimal_set(const TypeDistribution& mu, const TypeSpace& types,
                                       const ScenarioSet& scenarios, const LossModel& model,
                                       double eps, const std::vector<Point>& grid,
                                       const SolverSettings& settings) {
  if (grid.empty()) throw std::invalid_argument("epsilon_optimal_set needs a nonempty grid");
  if (!(eps >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
  const auto spectrum = equivalent_spectrum(types, mu);
  std::vector<double> values(grid.size());
  double reference = solve_follower(spectrum, scenarios, model, settings).value;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require_inside(model.domain(), grid[i]);
    values[i] = spectral_objective(grid[i], spectrum, model, scenarios);
    reference = std::min(reference, values[i]);
  }
  std::vector<Point> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (values[i] <= reference + eps) out.push_back(grid[i]);
  }
  return out;
}

std::vector<double> value_sensitivity(const FollowerSolution& solution,
                                      const TypeDistribution& mu, const TypeSpace& types,
                                      const ScenarioSet& scenarios, const LossModel& model) {
  if (mu.size() != types.size()) throw std::invalid_argument("value_sensitivity: dimension mismatch");
  const auto& grid = types.common_grid();
  if (solution.breakpoints != grid || solution.t_star.size() != grid.size()) {
    throw std::invalid_argument("solution quantiles do not match the type space grid");
  }
  const auto losses = scenario_losses(solution.x_star, model, scenarios);
  const double inv_n = 1.0 / static_cast<double>(losses.size());
  // Per-breakpoint value (1 - tau_i) t_i + (1/N) sum_k s_i^k with s = (z - t)_+.
  std::vector<double> term(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = solution.t_star[i];
    double slack = 0.0;
    for (double z : losses) slack += std::max(z - t, 0.0);
    term[i] = (1.0 - grid[i]) * t + slack * inv_n;
  }
  std::vector<double> out(types.size(), 0.0);
  for (std::size_t m = 0; m < types.size(); ++m) {
    const auto& a = types.grid_jumps(m);
    for (std::size_t i = 0; i < grid.size(); ++i) out[m] += a[i] * term[i];
  }
  return out;
}

void SampleSizeParams::validate() const {
  const bool positive = subgaussian_modulus > 0.0 && diameter > 0.0 && mean_lipschitz > 0.0 &&
                        breakpoints > 0 && big_o_constant > 0.0 && eps_outer > 0.0;
  if (!positive) throw std::invalid_argument("sample size parameters must be positive");
  if (!(eps_inner >= 0.0 && eps_inner < eps_outer)) {
    throw std::invalid_argument("sample size bound needs 0 <= eps_inner < eps_outer");
  }
  if (!(failure_probability > 0.0 && failure_probability < 1.0)) {
    throw std::invalid_argument("failure probability must lie in (0,1)");
  }
}

std::uint64_t sample_size_bound(const SampleSizeParams& p) {
  p.validate();
  const double gap = p.eps_outer - p.eps_inner;
  const double lead = p.big_o_constant * p.subgaussian_modulus * p.subgaussian_modulus *
                      p.diameter * p.diameter / (gap * gap);
  const double bracket =
      static_cast<double>(p.breakpoints) *
          std::log(p.big_o_constant * p.mean_lipschitz * p.diameter / gap) -
      std::log(p.failure_probability);
  const double raw = lead * bracket;
  // Guard against ceil() of a value that is integral up to rounding.
  const double n = std::ceil(raw - 1e-12 * std::max(1.0, std::abs(raw)));
  return n < 1.0 ? 1 : static_cast<std::uint64_t>(n);
}

}  // namespace stripe
