#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stripe/risk.hpp"
#include "stripe/type_space.hpp"

namespace stripe {

using Point = std::vector<double>;

/// Axis-aligned box [lower, upper] in R^n.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  Box(std::vector<double> lower, std::vector<double> upper);

  std::size_t dimension() const { return lower.size(); }
  bool contains(std::span<const double> x, double slack = 0.0) const;
  /// Componentwise clamp.
  Point project(std::span<const double> x) const;
  Point center() const;
  double diameter() const;
  /// Tensor grid with `points_per_axis` evenly spaced values per coordinate.
  std::vector<Point> grid(std::size_t points_per_axis) const;
};

enum class LossKind { linear, quadratic, hinge, logistic, newsvendor };

const char* to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& name);

/// Convex scenario loss f(x, xi) on a box domain.
///
/// Scenario layout per kind:
///   linear      xi in R^n,            f = scale * <xi, x>
///   quadratic   xi in R^n,            f = scale * |x - xi|^2
///   hinge       xi = (features, y),   f = scale * max(0, 1 - y <features, x>)
///   logistic    xi = (features, y),   f = scale * log(1 + exp(-y <features, x>))
///   newsvendor  xi = demand in R^n,   f = scale * sum_j h (x_j - d_j)_+ + b (d_j - x_j)_+
class LossModel {
 public:
  static LossModel linear(Box domain);
  static LossModel quadratic(Box domain);
  static LossModel hinge(Box domain);
  static LossModel logistic(Box domain);
  static LossModel newsvendor(Box domain, double overage_cost, double underage_cost);

  /// Same model with every loss multiplied by factor > 0.
  LossModel scaled(double factor) const;

  LossKind kind() const { return kind_; }
  const Box& domain() const { return domain_; }
  std::size_t dimension() const { return domain_.dimension(); }
  std::size_t scenario_dimension() const;
  double scale() const { return scale_; }
  double overage_cost() const { return overage_; }
  double underage_cost() const { return underage_; }

  double evaluate(std::span<const double> x, std::span<const double> xi) const;
  /// Writes a subgradient of f(., xi) at x into `out` (size dimension()).
  void subgradient(std::span<const double> x, std::span<const double> xi,
                   std::span<double> out) const;
  Point subgradient(std::span<const double> x, std::span<const double> xi) const;

 private:
  LossModel(LossKind kind, Box domain) : kind_(kind), domain_(std::move(domain)) {}

  LossKind kind_;
  Box domain_;
  double scale_ = 1.0;
  double overage_ = 1.0;
  double underage_ = 1.0;
};

/// How scenarios are drawn.
struct ScenarioSpec {
  enum class Kind { normal, uniform, exponential, classification };
  Kind kind = Kind::normal;
  std::size_t dimension = 1;
  /// normal: means; uniform: lower bounds; exponential: shifts;
  /// classification: feature means.
  std::vector<double> location;
  /// normal: standard deviations; uniform: upper bounds; exponential: means
  /// of the exponential part; classification: feature standard deviations.
  std::vector<double> scale;
  /// classification only: labelling hyperplane and label noise level.
  std::vector<double> weights;
  double label_noise = 0.0;
};

const char* to_string(ScenarioSpec::Kind kind);
ScenarioSpec::Kind scenario_kind_from_string(const std::string& name);

/// The i.i.d. draws xi_1..xi_N.
class ScenarioSet {
 public:
  ScenarioSet(std::vector<Point> samples, std::uint64_t seed);

  /// Deterministic draw: identical (spec, count, seed) yields identical samples.
  static ScenarioSet generate(const ScenarioSpec& spec, std::size_t count, std::uint64_t seed);

  std::size_t size() const { return samples_.size(); }
  std::size_t dimension() const { return samples_.front().size(); }
  const std::vector<Point>& samples() const { return samples_; }
  std::span<const double> operator[](std::size_t k) const { return samples_[k]; }
  std::uint64_t seed() const { return seed_; }

  /// Comment line with the seed, a header row, then one scenario per row.
  void write_csv(std::ostream& out) const;
  static ScenarioSet read_csv(std::istream& in);

 private:
  std::vector<Point> samples_;
  std::uint64_t seed_;
};

struct SolverSettings {
  /// Step length c / sqrt(k) with c = step_scale * diameter(X).
  double step_scale = 0.1;
  int max_iter = 5000;
  double tolerance = 1e-6;
  /// Subgradient phase stops early when the best value improves by less than
  /// tolerance over this many iterations.
  int stall_window = 500;
  /// Cyclic coordinate golden-section refinement after the subgradient phase.
  bool polish = true;
  int polish_sweeps = 50;
  /// Starting point; box center when empty.
  Point initial;
  /// Record every n-th subgradient iterate (0 disables the trace).
  int trace_every = 25;
};

struct IterateRecord {
  int iteration;
  double step;
  double objective;
  double best;
};

struct FollowerSolution {
  Point x_star;
  /// Breakpoints the quantile levels refer to.
  std::vector<double> breakpoints;
  /// Lower breakpoint-quantiles of the losses at x_star.
  std::vector<double> t_star;
  double value = 0.0;
  int iterations = 0;
  double final_step = 0.0;
  bool converged = false;
  std::vector<IterateRecord> trace;
};

/// Losses f(x, xi_k) in scenario order.
std::vector<double> scenario_losses(std::span<const double> x, const LossModel& model,
                                    const ScenarioSet& scenarios);

/// Spectral risk of the scenario losses at x under `spectrum`.
double spectral_objective(std::span<const double> x, const RiskSpectrum& spectrum,
                          const LossModel& model, const ScenarioSet& scenarios);

/// Value and a subgradient (sorted-weight rule) of the spectral objective.
double spectral_objective(std::span<const double> x, const RiskSpectrum& spectrum,
                          const LossModel& model, const ScenarioSet& scenarios,
                          std::span<double> subgradient);

/// Sampled step-spectrum follower objective under the population mixture mu.
/// Throws std::domain_error if x lies outside the model's box.
double follower_objective(std::span<const double> x, const TypeDistribution& mu,
                          const TypeSpace& types, const ScenarioSet& scenarios,
                          const LossModel& model);

FollowerSolution solve_follower(const RiskSpectrum& spectrum, const ScenarioSet& scenarios,
                                const LossModel& model, const SolverSettings& settings = {});

FollowerSolution solve_follower(const TypeDistribution& mu, const TypeSpace& types,
                                const ScenarioSet& scenarios, const LossModel& model,
                                const SolverSettings& settings = {});

/// Grid points whose objective is within eps of the best known optimum,
/// min(solver value, grid minimum).
std::vector<Point> epsilon_optimal_set(const TypeDistribution& mu, const TypeSpace& types,
                                       const ScenarioSet& scenarios, const LossModel& model,
                                       double eps, const std::vector<Point>& grid,
                                       const SolverSettings& settings = {});

/// Danskin derivative of the optimal follower value with respect to each mu_m,
/// evaluated at the solution's quantile levels and slack values.
std::vector<double> value_sensitivity(const FollowerSolution& solution,
                                      const TypeDistribution& mu, const TypeSpace& types,
                                      const ScenarioSet& scenarios, const LossModel& model);

struct SampleSizeParams {
  double subgaussian_modulus = 1.0;  // lambda
  double diameter = 1.0;             // D
  double mean_lipschitz = 1.0;       // E[kappa(xi)]
  std::size_t breakpoints = 1;       // n
  double failure_probability = 0.05; // beta
  double eps_outer = 1.0;            // eps_1
  double eps_inner = 0.0;            // eps_2
  double big_o_constant = 1.0;

  void validate() const;
};

/// Smallest N with N >= C lambda^2 D^2 / (eps1 - eps2)^2 *
/// [n ln(C E[kappa] D / (eps1 - eps2)) + ln(1 / beta)], at least 1.
std::uint64_t sample_size_bound(const SampleSizeParams& params);

}  // namespace stripe
