#include "config.hpp"

#include <fstream>

#include "stripe/io.hpp"

namespace stripe::cli {

namespace fs = std::filesystem;

Section::Section(const json& node, std::string path) : node_(&node), path_(std::move(path)) {
  if (!node.is_object()) throw ConfigError(path_ + ": expected an object");
}

bool Section::has(const std::string& key) const { return node_->contains(key); }

const json& Section::raw(const std::string& key) {
  if (!has(key)) throw ConfigError(path_ + ": missing key '" + key + "'");
  used_.insert(key);
  return node_->at(key);
}

Section Section::child(const std::string& key) { return Section(raw(key), path_ + "." + key); }

void Section::finish() const {
  std::string unknown;
  for (const auto& item : node_->items()) {
    if (used_.count(item.key())) continue;
    unknown += (unknown.empty() ? "" : ", ") + item.key();
  }
  if (!unknown.empty()) throw ConfigError(path_ + ": unknown key(s) " + unknown);
}

json load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
}

std::optional<std::string> output_directory(const json& root) {
  if (!root.is_object() || !root.contains("output")) return std::nullopt;
  if (!root["output"].is_string()) throw ConfigError("config.output: expected a string");
  return root["output"].get<std::string>();
}

namespace {

template <class F>
auto guarded(const std::string& where, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

ScenarioSet parse_scenarios(Section s, const Overrides& overrides, const fs::path& base) {
  if (s.has("csv")) {
    const fs::path file = base / s.required<std::string>("csv");
    s.finish();
    if (overrides.seed) throw ConfigError("--seed cannot override scenarios read from CSV");
    std::ifstream in(file);
    if (!in) throw ConfigError(s.path() + ".csv: cannot open " + file.string());
    return guarded(s.path(), [&] { return ScenarioSet::read_csv(in); });
  }
  ScenarioSpec spec;
  const auto kind = s.required<std::string>("kind");
  spec.kind = guarded(s.path() + ".kind", [&] { return scenario_kind_from_string(kind); });
  spec.dimension = s.required<std::size_t>("dimension");
  spec.location = s.optional<std::vector<double>>("location", {});
  spec.scale = s.optional<std::vector<double>>("scale", {});
  spec.weights = s.optional<std::vector<double>>("weights", {});
  spec.label_noise = s.optional<double>("label_noise", 0.0);
  const auto count = s.required<std::size_t>("count");
  auto seed = s.required<std::uint64_t>("seed");
  s.finish();
  if (count == 0) throw ConfigError(s.path() + ".count: must be positive");
  if (overrides.seed) seed = *overrides.seed;
  return guarded(s.path(), [&] { return ScenarioSet::generate(spec, count, seed); });
}

Box parse_box(Section& s) {
  auto lower = s.required<std::vector<double>>("lower");
  auto upper = s.required<std::vector<double>>("upper");
  return guarded(s.path(), [&] { return Box(std::move(lower), std::move(upper)); });
}

LossModel parse_loss(Section s) {
  const auto kind_name = s.required<std::string>("kind");
  const auto kind = guarded(s.path() + ".kind", [&] { return loss_kind_from_string(kind_name); });
  Box box = parse_box(s);
  const double scale = s.optional<double>("scale", 1.0);
  LossModel model = LossModel::linear(box);
  if (kind == LossKind::newsvendor) {
    const double h = s.optional<double>("overage_cost", 1.0);
    const double b = s.optional<double>("underage_cost", 1.0);
    model = guarded(s.path(), [&] { return LossModel::newsvendor(box, h, b); });
  } else if (kind == LossKind::quadratic) {
    model = LossModel::quadratic(box);
  } else if (kind == LossKind::hinge) {
    model = LossModel::hinge(box);
  } else if (kind == LossKind::logistic) {
    model = LossModel::logistic(box);
  }
  s.finish();
  if (!(scale > 0.0)) throw ConfigError(s.path() + ".scale: must be positive");
  return scale == 1.0 ? model : model.scaled(scale);
}

RiskSpectrum parse_spectrum_node(const json& node, const std::string& path) {
  if (node.is_object()) {
    Section s(node, path);
    const auto kind = s.required<std::string>("kind");
    if (kind == "avar") s.raw("level");
    if (kind == "semideviation") {
      s.raw("theta");
      s.raw("kappa");
    }
    s.finish();
  }
  return guarded(path, [&] { return spectrum_from_json(node); });
}

TypeSpace parse_types(Section s) {
  auto locations = s.required<std::vector<double>>("locations");
  const json& list = s.raw("spectra");
  s.finish();
  if (!list.is_array()) throw ConfigError(s.path() + ".spectra: expected a list");
  std::vector<RiskSpectrum> spectra;
  for (std::size_t i = 0; i < list.size(); ++i)
    spectra.push_back(parse_spectrum_node(list[i], s.path() + ".spectra[" + std::to_string(i) + "]"));
  return guarded(s.path(), [&] { return TypeSpace(std::move(locations), std::move(spectra)); });
}

TypeDistribution parse_distribution(Section& s, const std::string& key, std::size_t size) {
  auto weights = s.required<std::vector<double>>(key);
  if (weights.size() != size)
    throw ConfigError(s.path() + "." + key + ": expected " + std::to_string(size) + " weights");
  return guarded(s.path() + "." + key, [&] { return TypeDistribution(std::move(weights)); });
}

SolverSettings parse_solver(Section s, SolverSettings out) {
  out.step_scale = s.optional<double>("step_scale", out.step_scale);
  out.max_iter = s.optional<int>("max_iter", out.max_iter);
  out.tolerance = s.optional<double>("tolerance", out.tolerance);
  out.stall_window = s.optional<int>("stall_window", out.stall_window);
  out.polish = s.optional<bool>("polish", out.polish);
  out.polish_sweeps = s.optional<int>("polish_sweeps", out.polish_sweeps);
  out.initial = s.optional<std::vector<double>>("initial", out.initial);
  out.trace_every = s.optional<int>("trace_every", out.trace_every);
  s.finish();
  if (!(out.step_scale > 0.0)) throw ConfigError(s.path() + ".step_scale: must be positive");
  if (out.max_iter < 1) throw ConfigError(s.path() + ".max_iter: must be >= 1");
  if (!(out.tolerance >= 0.0)) throw ConfigError(s.path() + ".tolerance: must be >= 0");
  if (out.stall_window < 1) throw ConfigError(s.path() + ".stall_window: must be >= 1");
  if (out.polish_sweeps < 0) throw ConfigError(s.path() + ".polish_sweeps: must be >= 0");
  if (out.trace_every < 0) throw ConfigError(s.path() + ".trace_every: must be >= 0");
  return out;
}

LeaderLoss parse_leader(Section s, std::size_t dimension) {
  const auto kind = s.required<std::string>("kind");
  const auto parsed = guarded(s.path() + ".kind", [&] { return leader_loss_kind_from_string(kind); });
  if (parsed == LeaderLossKind::zero) {
    s.finish();
    return LeaderLoss::zero();
  }
  auto target = s.required<std::vector<double>>("target");
  const double weight = s.optional<double>("weight", 1.0);
  s.finish();
  if (target.size() != dimension)
    throw ConfigError(s.path() + ".target: dimension differs from the decision box");
  if (!(weight >= 0.0)) throw ConfigError(s.path() + ".weight: must be >= 0");
  return parsed == LeaderLossKind::quadratic ? LeaderLoss::quadratic(std::move(target), weight)
                                             : LeaderLoss::distance(std::move(target), weight);
}

void check_positive(double value, const std::string& where) {
  if (!(value > 0.0)) throw ConfigError(where + ": must be positive");
}

std::vector<double> parse_grid(Section& s, const std::string& key) {
  const json& node = s.raw(key);
  if (node.is_array()) {
    try {
      return node.get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ConfigError(s.path() + "." + key + ": expected numbers");
    }
  }
  Section g(node, s.path() + "." + key);
  const double lo = g.required<double>("min");
  const double hi = g.required<double>("max");
  const auto count = g.required<std::size_t>("count");
  g.finish();
  if (count < 2 || !(hi > lo)) throw ConfigError(g.path() + ": need count >= 2 and max > min");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = i + 1 == count ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

}  // namespace

FollowerConfig parse_follower_config(const json& root, const Overrides& overrides,
                                     const fs::path& base) {
  Section s(root, "config");
  s.optional<std::string>("output", "");
  auto scenarios = parse_scenarios(s.child("scenarios"), overrides, base);
  auto model = parse_loss(s.child("loss"));
  FollowerConfig cfg{std::move(scenarios), std::move(model), {}, {}, {}, {}, {}, 101};
  if (cfg.scenarios.dimension() != cfg.model.scenario_dimension())
    throw ConfigError("config.scenarios: dimension does not match the loss model");

  const bool by_mixture = s.has("types") || s.has("mu");
  if (by_mixture == s.has("spectrum"))
    throw ConfigError("config: give either 'types' with 'mu' or a single 'spectrum'");
  if (by_mixture) {
    cfg.types = parse_types(s.child("types"));
    cfg.mu = parse_distribution(s, "mu", cfg.types->size());
  } else {
    cfg.spectrum = parse_spectrum_node(s.raw("spectrum"), "config.spectrum");
  }
  cfg.solver = s.has("solver") ? parse_solver(s.child("solver"), {}) : SolverSettings{};
  if (!cfg.solver.initial.empty() && cfg.solver.initial.size() != cfg.model.dimension())
    throw ConfigError("config.solver.initial: dimension differs from the decision box");

  if (s.has("epsilon_set")) {
    Section e = s.child("epsilon_set");
    cfg.epsilon = e.required<double>("epsilon");
    cfg.points_per_axis = e.optional<std::size_t>("points_per_axis", cfg.points_per_axis);
    e.finish();
    if (cfg.points_per_axis < 2) throw ConfigError("config.epsilon_set.points_per_axis: must be >= 2");
  }
  if (overrides.epsilon) cfg.epsilon = *overrides.epsilon;
  if (cfg.epsilon && !(*cfg.epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  s.finish();
  return cfg;
}

StripeConfig parse_stripe_config(const json& root, const Overrides& overrides,
                                 const fs::path& base) {
  Section s(root, "config");
  s.optional<std::string>("output", "");
  auto scenarios = parse_scenarios(s.child("scenarios"), overrides, base);
  auto model = parse_loss(s.child("loss"));
  auto types = parse_types(s.child("types"));
  auto mu0 = parse_distribution(s, "mu0", types.size());
  const double gamma = s.required<double>("gamma");
  check_positive(gamma, "config.gamma");
  auto leader = parse_leader(s.child("leader"), model.dimension());
  if (scenarios.dimension() != model.scenario_dimension())
    throw ConfigError("config.scenarios: dimension does not match the loss model");

  StripeSettings settings;
  if (s.has("settings")) {
    Section t = s.child("settings");
    settings.epsilon = t.optional<double>("epsilon", settings.epsilon);
    settings.feas_tol = t.optional<double>("feas_tol", settings.feas_tol);
    settings.penalty_init = t.optional<double>("penalty_init", settings.penalty_init);
    settings.penalty_growth = t.optional<double>("penalty_growth", settings.penalty_growth);
    settings.penalty_rounds = t.optional<int>("penalty_rounds", settings.penalty_rounds);
    settings.inner_iterations = t.optional<int>("inner_iterations", settings.inner_iterations);
    settings.step_mu = t.optional<double>("step_mu", settings.step_mu);
    settings.step_x = t.optional<double>("step_x", settings.step_x);
    settings.delta = t.optional<double>("delta", settings.delta);
    settings.verify_simplex_steps =
        t.optional<std::size_t>("verify_simplex_steps", settings.verify_simplex_steps);
    settings.verify_points_per_axis =
        t.optional<std::size_t>("verify_points_per_axis", settings.verify_points_per_axis);
    settings.verify = t.optional<bool>("verify", settings.verify);
    if (t.has("follower")) settings.follower = parse_solver(t.child("follower"), settings.follower);
    t.finish();
  }
  if (overrides.epsilon) settings.epsilon = *overrides.epsilon;
  if (!(settings.epsilon > 0.0)) throw ConfigError("config.settings.epsilon: must be positive");
  check_positive(settings.penalty_init, "config.settings.penalty_init");
  if (!(settings.penalty_growth > 1.0))
    throw ConfigError("config.settings.penalty_growth: must exceed 1");
  if (settings.penalty_rounds < 1 || settings.inner_iterations < 1)
    throw ConfigError("config.settings: penalty_rounds and inner_iterations must be >= 1");
  check_positive(settings.step_mu, "config.settings.step_mu");
  check_positive(settings.step_x, "config.settings.step_x");
  if (!(settings.delta >= 0.0)) throw ConfigError("config.settings.delta: must be >= 0");
  if (settings.verify_simplex_steps < 1 || settings.verify_points_per_axis < 2)
    throw ConfigError("config.settings: verification grid too small");
  s.finish();

  auto problem = guarded("config", [&] {
    return StripeProblem(std::move(types), std::move(mu0), gamma, std::move(leader),
                         std::move(model), std::move(scenarios));
  });
  return {std::move(problem), settings};
}

BoundsConfig parse_bounds_config(const json& root, const Overrides& overrides) {
  Section s(root, "config");
  s.optional<std::string>("output", "");
  BoundsConfig cfg;
  if (s.has("family")) {
    Section f = s.child("family");
    cfg.family.scenarios = f.optional<std::size_t>("scenarios", cfg.family.scenarios);
    cfg.family.grid_points = f.optional<std::size_t>("grid_points", cfg.family.grid_points);
    cfg.family.simplex_steps = f.optional<std::size_t>("simplex_steps", cfg.family.simplex_steps);
    cfg.family.gamma = f.optional<double>("gamma", cfg.family.gamma);
    f.finish();
  }
  if (cfg.family.scenarios < 2 || cfg.family.grid_points < 2 || cfg.family.simplex_steps < 1)
    throw ConfigError("config.family: grid or sample sizes too small");
  check_positive(cfg.family.gamma, "config.family.gamma");

  cfg.first_seed = s.optional<std::uint64_t>("first_seed", cfg.first_seed);
  if (overrides.seed) cfg.first_seed = *overrides.seed;
  cfg.instances = s.optional<std::size_t>("instances", cfg.instances);
  if (cfg.instances == 0) throw ConfigError("config.instances: must be positive");

  cfg.checks = s.required<std::vector<std::string>>("checks");
  if (cfg.checks.empty()) throw ConfigError("config.checks: empty check list");
  for (const auto& c : cfg.checks)
    if (c != "deviation" && c != "performance_reduction" && c != "compromise")
      throw ConfigError("config.checks: unknown check '" + c + "'");

  cfg.epsilon = s.optional<double>("epsilon", cfg.epsilon);
  if (overrides.epsilon) cfg.epsilon = *overrides.epsilon;
  if (!(cfg.epsilon >= 0.0)) throw ConfigError("config.epsilon: must be >= 0");
  cfg.compromise.epsilon = cfg.epsilon;

  cfg.growth_exclusion = s.optional<double>("growth_exclusion", cfg.growth_exclusion);
  if (!(cfg.growth_exclusion >= 0.0)) throw ConfigError("config.growth_exclusion: must be >= 0");
  cfg.deviation_r = s.optional<double>("deviation_r", cfg.deviation_r);
  cfg.reduction_r = s.optional<double>("reduction_r", cfg.reduction_r);
  if (!(cfg.deviation_r >= 0.0 && cfg.deviation_r <= 1.0) ||
      !(cfg.reduction_r >= 0.0 && cfg.reduction_r <= 1.0))
    throw ConfigError("config: deviation_r and reduction_r must lie in [0, 1]");

  if (s.has("compromise")) {
    Section c = s.child("compromise");
    cfg.compromise.exclusion_radius =
        c.optional<double>("exclusion_radius", cfg.compromise.exclusion_radius);
    cfg.compromise.trials = c.optional<std::size_t>("trials", cfg.compromise.trials);
    cfg.compromise.seed = c.optional<std::uint64_t>("seed", cfg.compromise.seed);
    cfg.compromise.proximity = c.optional<double>("proximity", cfg.compromise.proximity);
    c.finish();
    check_positive(cfg.compromise.proximity, "config.compromise.proximity");
  }
  s.finish();
  return cfg;
}

ContractConfig parse_contract_config(const json& root, const Overrides& overrides) {
  Section s(root, "config");
  s.optional<std::string>("output", "");
  auto types = parse_types(s.child("types"));
  auto mu0 = parse_distribution(s, "mu0", types.size());
  ContractConfig cfg{ContractInstance{.outcomes = {},
                                      .low_effort = {},
                                      .high_effort = {},
                                      .actions = {},
                                      .wage_levels = {},
                                      .types = std::move(types),
                                      .mu0 = std::move(mu0)},
                     {},
                     {}};
  auto& c = cfg.instance;
  c.outcomes = s.required<std::vector<double>>("outcomes");
  c.low_effort = s.required<std::vector<double>>("low_effort");
  c.high_effort = s.required<std::vector<double>>("high_effort");
  c.actions = parse_grid(s, "actions");
  c.wage_levels = parse_grid(s, "wage_levels");
  if (s.has("reservation") && !s.raw("reservation").is_null())
    c.reservation = s.required<double>("reservation");
  c.effort_cost = s.optional<double>("effort_cost", c.effort_cost);
  c.effort_power = s.optional<double>("effort_power", c.effort_power);
  if (s.has("utility")) {
    Section u = s.child("utility");
    c.utility_kink = u.optional<double>("kink", c.utility_kink);
    c.utility_slope = u.optional<double>("slope", c.utility_slope);
    u.finish();
  }
  c.gamma = s.required<double>("gamma");
  check_positive(c.gamma, "config.gamma");
  c.simplex_steps = s.optional<std::size_t>("simplex_steps", c.simplex_steps);
  cfg.epsilons = s.required<std::vector<double>>("epsilons");
  if (overrides.epsilon) cfg.epsilons = {*overrides.epsilon};
  for (double e : cfg.epsilons)
    if (!(e >= 0.0)) throw ConfigError("config.epsilons: values must be >= 0");
  if (s.has("max_exponent")) cfg.max_exponent = s.required<double>("max_exponent");
  s.finish();
  guarded("config", [&] {
    c.validate();
    return 0;
  });
  return cfg;
}

MetaConfig parse_meta_config(const json& root, const Overrides& overrides, const fs::path& base) {
  Section s(root, "config");
  s.optional<std::string>("output", "");
  auto data = parse_scenarios(s.child("data"), overrides, base);
  auto types = parse_types(s.child("types"));
  auto mu = parse_distribution(s, "mu", types.size());
  const double step = s.required<double>("step");
  Section d = s.child("domain");
  Box domain = parse_box(d);
  d.finish();
  auto reference = s.optional<std::vector<double>>("reference", {});
  const double weight = s.optional<double>("guidance_weight", 0.0);
  MetaSettings settings;
  if (s.has("training")) {
    Section t = s.child("training");
    settings.max_iter = t.optional<int>("max_iter", settings.max_iter);
    settings.tolerance = t.optional<double>("tolerance", settings.tolerance);
    settings.initial = t.optional<std::vector<double>>("initial", settings.initial);
    t.finish();
  }
  s.finish();
  if (!(step > 0.0)) throw ConfigError("config.step: must be positive");
  if (settings.max_iter < 1) throw ConfigError("config.training.max_iter: must be >= 1");
  if (!settings.initial.empty() && settings.initial.size() != domain.dimension())
    throw ConfigError("config.training.initial: dimension differs from the domain");
  MetaConfig cfg{MetaInstance{std::move(types), std::move(mu), step, std::move(domain),
                              std::move(reference), weight},
                 std::move(data), settings};
  guarded("config", [&] {
    cfg.instance.validate(cfg.data);
    return 0;
  });
  return cfg;
}

}  // namespace stripe::cli
