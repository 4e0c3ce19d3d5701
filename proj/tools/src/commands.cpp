#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

namespace stripe::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) : width_(header.size()) { add(header); }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw std::logic_error("table row width mismatch");
    add(cells);
  }

  void save(const fs::path& path) const { write_file(path, text_.str()); }

  static void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
  }

 private:
  void add(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) text_ << (i ? "," : "") << cells[i];
    text_ << '\n';
  }

  std::size_t width_;
  std::ostringstream text_;
};

void save_json(const fs::path& path, const json& record) {
  Table::write_file(path, record.dump(2) + "\n");
}

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

std::string join(std::span<const double> v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out + ")";
}

using Body = int (*)(const json& root, const Invocation& call, const fs::path& out,
                     const fs::path& base);

int run(const Invocation& call, const char* command, Body body) {
  const auto start = std::chrono::steady_clock::now();
  fs::path out;
  int code = exit_ok;
  try {
    const json root = load_config(call.config);
    out = call.out ? fs::path(*call.out)
                   : fs::path(output_directory(root).value_or(std::string("out/") + command));
    code = body(root, call, out, call.config.parent_path());
  } catch (const ConfigError& e) {
    std::cerr << "stripe " << command << ": configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    std::cerr << "stripe " << command << ": " << e.what() << '\n';
    return exit_runtime;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  std::ofstream log(out / "run.log", std::ios::app);
  log << stamp << ' ' << command << " config=" << call.config.string() << " exit=" << code
      << " seconds=" << fmt(elapsed) << '\n';
  return code;
}

// Creates the output directory once the configuration has been accepted.
void prepare(const fs::path& out) { fs::create_directories(out); }

int follower_body(const json& root, const Invocation& call, const fs::path& out,
                  const fs::path& base) {
  const auto cfg = parse_follower_config(root, call.overrides, base);
  const auto sol = cfg.spectrum
                       ? solve_follower(*cfg.spectrum, cfg.scenarios, cfg.model, cfg.solver)
                       : solve_follower(*cfg.mu, *cfg.types, cfg.scenarios, cfg.model, cfg.solver);

  json record = {{"command", "solve-follower"},
                 {"seed", cfg.scenarios.seed()},
                 {"scenarios", cfg.scenarios.size()},
                 {"x_star", sol.x_star},
                 {"value", sol.value},
                 {"iterations", sol.iterations},
                 {"final_step", sol.final_step},
                 {"converged", sol.converged},
                 {"breakpoints", sol.breakpoints},
                 {"t_star", sol.t_star}};
  if (cfg.mu)
    record["value_sensitivity"] =
        value_sensitivity(sol, *cfg.mu, *cfg.types, cfg.scenarios, cfg.model);

  std::size_t set_size = 0;
  if (cfg.epsilon) {
    const auto grid = cfg.model.domain().grid(cfg.points_per_axis);
    const auto& types = cfg.types ? *cfg.types : TypeSpace({0.0}, {*cfg.spectrum});
    const auto mu = cfg.mu ? *cfg.mu : TypeDistribution::point_mass(1, 0);
    const auto set =
        epsilon_optimal_set(mu, types, cfg.scenarios, cfg.model, *cfg.epsilon, grid, cfg.solver);
    set_size = set.size();
    const std::size_t n = cfg.model.dimension();
    std::vector<double> lo(n, INFINITY), hi(n, -INFINITY);
    for (const auto& p : set)
      for (std::size_t j = 0; j < n; ++j) {
        lo[j] = std::min(lo[j], p[j]);
        hi[j] = std::max(hi[j], p[j]);
      }
    record["epsilon_set"] = {{"epsilon", *cfg.epsilon},
                             {"points_per_axis", cfg.points_per_axis},
                             {"members", set.size()},
                             {"lower", set.empty() ? json() : json(lo)},
                             {"upper", set.empty() ? json() : json(hi)}};
  }

  prepare(out);
  save_json(out / "follower.json", record);
  Table trace({"iteration", "step", "objective", "best"});
  for (const auto& r : sol.trace)
    trace.row({std::to_string(r.iteration), fmt(r.step), fmt(r.objective), fmt(r.best)});
  trace.save(out / "trace.csv");
  {
    std::ofstream scen(out / "scenarios.csv", std::ios::binary);
    cfg.scenarios.write_csv(scen);
  }

  std::cout << "solve-follower: x* = " << join(sol.x_star) << ", U* = " << fmt(sol.value)
            << ", iterations = " << sol.iterations
            << (sol.converged ? ", converged" : ", NOT converged") << '\n';
  if (cfg.epsilon)
    std::cout << "  epsilon-optimal grid points at eps = " << fmt(*cfg.epsilon) << ": " << set_size
              << '\n';
  std::cout << "  results in " << out.string() << '\n';
  return sol.converged ? exit_ok : exit_check_failed;
}

json verification_json(const VerificationReport& v) {
  return {{"epsilon", v.epsilon},
          {"delta", v.delta},
          {"follower_value", v.follower_value},
          {"follower_optimum", v.follower_optimum},
          {"follower_ok", v.follower_ok},
          {"candidate_worst", v.candidate_worst},
          {"robust_value", v.robust_value},
          {"required_delta", v.required_delta},
          {"leader_ok", v.leader_ok},
          {"certified", v.certified}};
}

int stripe_body(const json& root, const Invocation& call, const fs::path& out,
                const fs::path& base) {
  const auto cfg = parse_stripe_config(root, call.overrides, base);
  const auto& P = cfg.problem;
  const auto eq = solve_stripe(P, cfg.settings);

  json record = {{"command", "solve-stripe"},
                 {"seed", P.scenarios.seed()},
                 {"gamma", P.gamma},
                 {"mu0", to_vector(P.mu0.weights())},
                 {"mu_hat", to_vector(eq.mu_hat.weights())},
                 {"x_hat", eq.x_hat},
                 {"leader_value", eq.leader_value},
                 {"follower_value", eq.follower_value},
                 {"design_cost", P.gamma * wasserstein1(eq.mu_hat, P.mu0, P.types)},
                 {"type_risks", type_risks(eq.x_hat, P)},
                 {"epsilon", eq.epsilon},
                 {"delta", eq.delta},
                 {"feasible", eq.feasible},
                 {"certified", eq.certified},
                 {"diagnostics", eq.diagnostics}};
  if (cfg.settings.verify) record["verification"] = verification_json(eq.verification);

  prepare(out);
  save_json(out / "equilibrium.json", record);
  std::vector<std::string> header = {"round", "iteration", "penalty", "leader_value", "violation",
                                     "best"};
  for (std::size_t m = 0; m < P.types.size(); ++m) header.push_back("mu_" + std::to_string(m));
  for (std::size_t j = 0; j < P.model.dimension(); ++j) header.push_back("x_" + std::to_string(j));
  Table trace(header);
  for (const auto& it : eq.trace) {
    std::vector<std::string> row = {std::to_string(it.round), std::to_string(it.iteration),
                                    fmt(it.penalty),          fmt(it.leader_value),
                                    fmt(it.violation),        fmt(it.best)};
    for (double v : it.mu) row.push_back(fmt(v));
    for (double v : it.x) row.push_back(fmt(v));
    trace.row(row);
  }
  trace.save(out / "trace.csv");

  std::cout << "solve-stripe: mu_hat = " << join(eq.mu_hat.weights())
            << ", x_hat = " << join(eq.x_hat) << ", J = " << fmt(eq.leader_value)
            << ", U = " << fmt(eq.follower_value) << '\n';
  if (cfg.settings.verify)
    std::cout << "  verification at (eps, delta) = (" << fmt(eq.epsilon) << ", " << fmt(eq.delta)
              << "): " << (eq.certified ? "certified" : "NOT certified")
              << ", required delta = " << fmt(eq.verification.required_delta) << '\n';
  std::cout << "  results in " << out.string() << '\n';
  if (!eq.feasible) return exit_check_failed;
  return (!cfg.settings.verify || eq.certified) ? exit_ok : exit_check_failed;
}

int bounds_body(const json& root, const Invocation& call, const fs::path& out, const fs::path&) {
  const auto cfg = parse_bounds_config(root, call.overrides);
  auto wants = [&](const char* name) {
    return std::find(cfg.checks.begin(), cfg.checks.end(), name) != cfg.checks.end();
  };

  prepare(out);
  CounterexampleSink sink(out / "counterexamples");
  Table table({"seed", "check", "lhs", "rhs", "holds", "epsilon", "r", "w", "iota", "lipschitz",
               "gamma", "regularity"});
  json reports = json::array();
  std::size_t total = 0, failed = 0;

  for (std::size_t i = 0; i < cfg.instances; ++i) {
    const std::uint64_t seed = cfg.first_seed + i;
    const auto inst = random_bound_instance(cfg.family, seed);
    const auto& P = inst.problem;
    const json context = {{"seed", seed},
                          {"family",
                           {{"scenarios", cfg.family.scenarios},
                            {"grid_points", cfg.family.grid_points},
                            {"simplex_steps", cfg.family.simplex_steps},
                            {"gamma", cfg.family.gamma}}},
                          {"mu0", to_vector(P.mu0.weights())},
                          {"mu_bar", to_vector(inst.mu_bar.weights())},
                          {"types", to_vector(P.types.locations())}};

    std::vector<BoundReport> batch;
    if (wants("deviation") || wants("performance_reduction")) {
      const auto growth =
          estimate_growth_constant(inst.table, inst.mu_bar.weights(), cfg.growth_exclusion);
      if (wants("deviation")) {
        const auto mu = TypeDistribution::mixture(inst.mu_bar, P.mu0, cfg.deviation_r);
        batch.push_back(
            check_deviation_bound(P, inst.table, mu, inst.mu_bar, cfg.epsilon, growth.iota));
      }
      if (wants("performance_reduction")) {
        const double lip = estimate_lipschitz(P.leader, inst.table.grid());
        batch.push_back(check_performance_reduction(P, inst.table, inst.mu_bar, cfg.reduction_r,
                                                    cfg.epsilon, growth.iota, lip));
      }
    }
    if (wants("compromise")) {
      const StripeGrid grid(P, simplex_lattice(P.types.size(), cfg.family.simplex_steps),
                            inst.table.grid());
      batch.push_back(run_compromise_check(P, grid, cfg.compromise).report);
    }

    for (const auto& r : batch) {
      ++total;
      if (!r.holds) ++failed;
      sink.record(r, context);
      json entry = to_json(r);
      entry["seed"] = seed;
      reports.push_back(entry);
      table.row({std::to_string(seed), r.check, fmt(r.lhs), fmt(r.rhs), r.holds ? "1" : "0",
                 fmt(r.epsilon), fmt(r.r), fmt(r.w), fmt(r.iota), fmt(r.lipschitz), fmt(r.gamma),
                 fmt(r.regularity)});
    }
  }

  save_json(out / "bounds.json", {{"command", "verify-bounds"},
                                  {"checks", cfg.checks},
                                  {"first_seed", cfg.first_seed},
                                  {"instances", cfg.instances},
                                  {"reports", reports},
                                  {"failures", failed},
                                  {"all_hold", failed == 0}});
  table.save(out / "bounds.csv");

  std::cout << "verify-bounds: " << total - failed << " of " << total << " checks hold over "
            << cfg.instances << " instance(s)";
  if (failed) std::cout << "; counterexamples in " << sink.directory().string();
  std::cout << "\n  results in " << out.string() << '\n';
  return failed == 0 ? exit_ok : exit_check_failed;
}

json contract_json(const ContractRecord& r) {
  return {{"feasible", r.feasible},       {"wages", r.wages},
          {"mu", r.mu},                   {"action", r.action},
          {"principal_value", r.principal_value},
          {"design_cost", r.design_cost}, {"agent_value", r.agent_value},
          {"agent_optimum", r.agent_optimum}};
}

int contract_body(const json& root, const Invocation& call, const fs::path& out,
                  const fs::path&) {
  const auto cfg = parse_contract_config(root, call.overrides);
  const auto& inst = cfg.instance;

  bool ok = true;
  std::optional<SweepResult> sweep;
  std::optional<ContractRecord> single;
  if (call.overrides.epsilon) {
    single = solve_contract(inst, cfg.epsilons.front());
    ok = single->feasible;
  } else {
    sweep = sweep_epsilon_ic(inst, cfg.epsilons);
  }

  json record = {{"command", "scenario contract"}};
  std::string monotone_note;
  if (sweep) {
    const std::size_t K = inst.outcomes.size();
    std::vector<std::string> header = {"epsilon", "value", "gap", "action", "design_cost",
                                       "agent_value"};
    for (std::size_t k = 0; k < K; ++k) header.push_back("w_" + std::to_string(k));
    for (std::size_t m = 0; m < inst.types.size(); ++m) header.push_back("mu_" + std::to_string(m));
    Table table(header);
    json rows = json::array();
    bool monotone = true;
    double previous = 0.0;
    for (const auto& row : sweep->rows) {
      if (row.gap < 0.0 || row.gap < previous) monotone = false;
      previous = row.gap;
      std::vector<std::string> cells = {fmt(row.epsilon),          fmt(row.value),
                                        fmt(row.gap),              fmt(row.record.action),
                                        fmt(row.record.design_cost), fmt(row.record.agent_value)};
      for (double w : row.record.wages) cells.push_back(fmt(w));
      for (double m : row.record.mu) cells.push_back(fmt(m));
      table.row(cells);
      json entry = contract_json(row.record);
      entry["epsilon"] = row.epsilon;
      entry["gap"] = row.gap;
      rows.push_back(entry);
    }
    record["sweep"] = rows;
    record["gap_monotone"] = monotone;
    record["exponent"] = sweep->exponent ? json(*sweep->exponent) : json();
    ok = ok && monotone;
    if (cfg.max_exponent) {
      const bool within = sweep->exponent && *sweep->exponent <= *cfg.max_exponent;
      record["max_exponent"] = *cfg.max_exponent;
      record["exponent_ok"] = within;
      ok = ok && within;
    }
    prepare(out);
    table.save(out / "sweep.csv");
    monotone_note = monotone ? "gap nonnegative and nondecreasing" : "gap NOT monotone";
  } else {
    record["epsilon"] = cfg.epsilons.front();
    record["contract"] = contract_json(*single);
    prepare(out);
  }
  save_json(out / "contract.json", record);

  if (sweep) {
    std::cout << "scenario contract: " << sweep->rows.size() << " sweep rows, " << monotone_note
              << ", fitted exponent = "
              << (sweep->exponent ? fmt(*sweep->exponent) : std::string("undefined")) << '\n';
    for (const auto& row : sweep->rows)
      std::cout << "  eps = " << fmt(row.epsilon) << "  value = " << fmt(row.value)
                << "  gap = " << fmt(row.gap) << '\n';
  } else if (single->feasible) {
    std::cout << "scenario contract: eps = " << fmt(cfg.epsilons.front())
              << ", value = " << fmt(single->principal_value) << ", action = "
              << fmt(single->action) << ", wages = " << join(single->wages) << '\n';
  } else {
    std::cout << "scenario contract: no feasible contract at eps = " << fmt(cfg.epsilons.front())
              << '\n';
  }
  std::cout << "  results in " << out.string() << '\n';
  return ok ? exit_ok : exit_check_failed;
}

int meta_body(const json& root, const Invocation& call, const fs::path& out, const fs::path& base) {
  const auto cfg = parse_meta_config(root, call.overrides, base);
  const auto& inst = cfg.instance;
  const auto sol = train_meta(inst, cfg.data, cfg.settings);

  const std::size_t M = inst.types.size();
  Table table({"task", "mu", "estimate", "exact", "adapted", "unadapted"});
  json tasks = json::array();
  double weighted = 0.0;
  bool over = true;
  for (std::size_t m = 0; m < M; ++m) {
    const double estimate = adaptation_estimate(sol, inst.mu, m);
    const double exact = resolve_task(inst, cfg.data, m, sol.x, cfg.settings);
    weighted += inst.mu[m] * estimate;
    if (estimate < exact - 1e-6) over = false;
    table.row({std::to_string(m), fmt(inst.mu[m]), fmt(estimate), fmt(exact), fmt(sol.adapted[m]),
               fmt(sol.unadapted[m])});
    tasks.push_back({{"task", m},
                     {"mu", inst.mu[m]},
                     {"estimate", estimate},
                     {"exact", exact},
                     {"adapted", sol.adapted[m]},
                     {"unadapted", sol.unadapted[m]}});
  }
  const double identity = weighted - sol.value;
  const bool identity_ok = std::abs(identity) <= 1e-9;

  prepare(out);
  save_json(out / "meta.json", {{"command", "scenario meta"},
                                {"seed", cfg.data.seed()},
                                {"x", sol.x},
                                {"value", sol.value},
                                {"guidance", sol.guidance},
                                {"iterations", sol.iterations},
                                {"converged", sol.converged},
                                {"tasks", tasks},
                                {"identity_residual", identity},
                                {"identity_ok", identity_ok},
                                {"over_estimation_ok", over}});
  table.save(out / "adaptation.csv");

  std::cout << "scenario meta: x* = " << join(sol.x) << ", U* = " << fmt(sol.value)
            << ", iterations = " << sol.iterations
            << (sol.converged ? ", converged" : ", NOT converged") << '\n';
  std::cout << "  sum_m mu_m estimate_m - U* = " << fmt(identity)
            << (over ? "; every estimate >= re-solved task value"
                     : "; an estimate falls below its re-solved value")
            << '\n';
  std::cout << "  results in " << out.string() << '\n';
  return (sol.converged && identity_ok && over) ? exit_ok : exit_check_failed;
}

}  // namespace

int run_solve_follower(const Invocation& call) { return run(call, "solve-follower", follower_body); }
int run_solve_stripe(const Invocation& call) { return run(call, "solve-stripe", stripe_body); }
int run_verify_bounds(const Invocation& call) { return run(call, "verify-bounds", bounds_body); }
int run_contract(const Invocation& call) { return run(call, "contract", contract_body); }
int run_meta(const Invocation& call) { return run(call, "meta", meta_body); }

}  // namespace stripe::cli
