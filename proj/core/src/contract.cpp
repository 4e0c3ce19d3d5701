#include "stripe/contract.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace stripe {

namespace {

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

void check_distribution(const std::vector<double>& p, std::size_t size, const char* name) {
  if (p.size() != size) throw std::invalid_argument(std::string(name) + ": wrong length");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(name) + ": negative or non-finite probability");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(name) + ": probabilities must sum to 1");
}

}  // namespace

void ContractInstance::validate() const {
  require(outcomes.size() >= 2, "contract: at least two outcomes required");
  for (std::size_t k = 1; k < outcomes.size(); ++k)
    require(outcomes[k] > outcomes[k - 1], "contract: outcomes must be strictly increasing");
  check_distribution(low_effort, outcomes.size(), "contract low_effort");
  check_distribution(high_effort, outcomes.size(), "contract high_effort");
  require(!actions.empty(), "contract: empty action grid");
  for (double a : actions) require(a >= 0.0 && a <= 1.0, "contract: actions must lie in [0, 1]");
  require(!wage_levels.empty(), "contract: empty wage grid");
  for (double w : wage_levels) require(std::isfinite(w), "contract: non-finite wage level");
  require(!std::isnan(reservation), "contract: reservation is NaN");
  require(effort_cost >= 0.0 && std::isfinite(effort_cost), "contract: effort_cost must be >= 0");
  require(effort_power >= 1.0, "contract: effort_power must be >= 1");
  require(utility_slope >= 0.0 && utility_slope <= 1.0,
          "contract: utility_slope must lie in [0, 1]");
  require(mu0.size() == types.size(), "contract: mu0 size differs from type count");
  require(gamma > 0.0, "contract: gamma must be positive");
  require(simplex_steps >= 1, "contract: simplex_steps must be >= 1");
}

std::vector<double> ContractInstance::outcome_probabilities(double action) const {
  std::vector<double> p(outcomes.size());
  for (std::size_t k = 0; k < p.size(); ++k)
    p[k] = (1.0 - action) * low_effort[k] + action * high_effort[k];
  return p;
}

double ContractInstance::utility(double wage) const {
  return std::min(wage, utility_kink + utility_slope * (wage - utility_kink));
}

std::vector<double> ContractInstance::agent_losses(const std::vector<double>& wages,
                                                   double action) const {
  const double effort = effort_cost * std::pow(action, effort_power);
  std::vector<double> out(wages.size());
  for (std::size_t k = 0; k < wages.size(); ++k) out[k] = effort - utility(wages[k]);
  return out;
}

ContractRecord solve_contract(const ContractInstance& inst, double eps_ic) {
  if (!(eps_ic >= 0.0)) throw std::invalid_argument("solve_contract: eps_ic must be >= 0");
  inst.validate();

  const std::size_t K = inst.outcomes.size();
  const std::size_t A = inst.actions.size();
  const std::size_t L = inst.wage_levels.size();
  const std::size_t M = inst.types.size();

  std::vector<std::vector<double>> probs(A);
  for (std::size_t a = 0; a < A; ++a) probs[a] = inst.outcome_probabilities(inst.actions[a]);

  const auto lattice = simplex_lattice(M, inst.simplex_steps);
  std::vector<double> design(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i)
    design[i] = inst.gamma * wasserstein1(lattice[i], inst.mu0, inst.types);

  ContractRecord best;
  std::vector<std::size_t> digits(K, 0);
  std::vector<double> wages(K);
  std::vector<double> risks(M * A);
  std::vector<double> cost(A);
  std::vector<double> agent(A);

  for (bool more = true; more;) {
    for (std::size_t k = 0; k < K; ++k) wages[k] = inst.wage_levels[digits[k]];

    for (std::size_t a = 0; a < A; ++a) {
      const auto losses = inst.agent_losses(wages, inst.actions[a]);
      for (std::size_t m = 0; m < M; ++m)
        risks[m * A + a] = spectral_risk(losses, probs[a], inst.types.spectrum(m));
      double c = 0.0;
      for (std::size_t k = 0; k < K; ++k) c += probs[a][k] * (wages[k] + inst.outcomes[k]);
      cost[a] = c;
    }

    for (std::size_t i = 0; i < lattice.size(); ++i) {
      const auto mu = lattice[i].weights();
      double floor_value = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < A; ++a) {
        double v = 0.0;
        for (std::size_t m = 0; m < M; ++m) v += mu[m] * risks[m * A + a];
        agent[a] = v;
        floor_value = std::min(floor_value, v);
      }
      for (std::size_t a = 0; a < A; ++a) {
        if (agent[a] > floor_value + eps_ic || agent[a] > inst.reservation) continue;
        const double value = cost[a] + design[i];
        if (value < best.principal_value) {
          best.feasible = true;
          best.wages = wages;
          best.mu.assign(mu.begin(), mu.end());
          best.action = inst.actions[a];
          best.principal_value = value;
          best.design_cost = design[i];
          best.agent_value = agent[a];
          best.agent_optimum = floor_value;
        }
      }
    }

    more = false;
    for (std::size_t k = K; k-- > 0;) {
      if (++digits[k] < L) {
        more = true;
        break;
      }
      digits[k] = 0;
    }
  }
  return best;
}

SweepResult sweep_epsilon_ic(const ContractInstance& inst, std::vector<double> epsilons) {
  for (double e : epsilons)
    if (!(e >= 0.0)) throw std::invalid_argument("sweep_epsilon_ic: epsilons must be >= 0");
  epsilons.push_back(0.0);
  std::sort(epsilons.begin(), epsilons.end());
  epsilons.erase(std::unique(epsilons.begin(), epsilons.end()), epsilons.end());

  SweepResult result;
  double reference = 0.0;
  for (double e : epsilons) {
    const auto record = solve_contract(inst, e);
    if (!record.feasible)
      throw std::domain_error("sweep_epsilon_ic: no feasible contract at eps = " +
                              std::to_string(e));
    if (e == 0.0) reference = record.principal_value;
    result.rows.push_back({e, record.principal_value, reference - record.principal_value, record});
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (const auto& row : result.rows) {
    if (row.epsilon <= 0.0 || row.gap <= 0.0) continue;
    const double lx = std::log(row.epsilon), ly = std::log(row.gap);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n >= 2) {
    const double denom = static_cast<double>(n) * sxx - sx * sx;
    if (denom > 0.0) result.exponent = (static_cast<double>(n) * sxy - sx * sy) / denom;
  }
  return result;
}

}  // namespace stripe
