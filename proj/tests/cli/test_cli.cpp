#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = STRIPE_CONFIG_DIR;

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + STRIPE_CLI + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("stripe_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json read_json(const fs::path& file) {
  std::ifstream in(file);
  return nlohmann::json::parse(in);
}

fs::path write_json(const fs::path& file, const nlohmann::json& j) {
  std::ofstream(file) << j.dump(2);
  return file;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("a missing config file is rejected without output") {
  const auto dir = scratch("missing");
  const auto out = dir / "out";
  CHECK(run("solve-follower " + quoted(dir / "nope.json") + " --out " + quoted(out)) != 0);
  CHECK_FALSE(fs::exists(out / "follower.json"));
}

TEST_CASE("usage errors exit with the configuration code") {
  CHECK(run("") == 2);
  CHECK(run("no-such-command") == 2);
  CHECK(run("scenario") == 2);
  CHECK(run("solve-follower") == 2);
}

TEST_CASE("a fixed seed reproduces the records byte for byte") {
  const auto dir = scratch("seed");
  const auto cfg = kConfigs / "follower.json";
  REQUIRE(run("solve-follower " + quoted(cfg) + " --seed 5 --out " + quoted(dir / "a")) == 0);
  REQUIRE(run("solve-follower " + quoted(cfg) + " --seed 5 --out " + quoted(dir / "a2")) == 0);
  REQUIRE(run("solve-follower " + quoted(cfg) + " --seed 6 --out " + quoted(dir / "b")) == 0);
  for (const char* name : {"follower.json", "trace.csv", "scenarios.csv"}) {
    CHECK(slurp(dir / "a" / name) == slurp(dir / "a2" / name));
  }
  CHECK(slurp(dir / "a" / "scenarios.csv") != slurp(dir / "b" / "scenarios.csv"));
}

TEST_CASE("a non-positive design cost is a configuration error") {
  const auto dir = scratch("gamma");
  auto cfg = read_json(kConfigs / "stripe_m2.json");
  for (double gamma : {0.0, -1.0}) {
    cfg["gamma"] = gamma;
    const auto file = write_json(dir / "stripe.json", cfg);
    CHECK(run("solve-stripe " + quoted(file) + " --out " + quoted(dir / "out")) == 2);
    CHECK_FALSE(fs::exists(dir / "out" / "equilibrium.json"));
  }
}

TEST_CASE("unknown keys are rejected") {
  const auto dir = scratch("keys");
  auto cfg = read_json(kConfigs / "follower.json");
  cfg["solver"]["max_iterations"] = 10;
  const auto file = write_json(dir / "follower.json", cfg);
  CHECK(run("solve-follower " + quoted(file) + " --out " + quoted(dir / "out")) == 2);
}

TEST_CASE("an empty check list is rejected") {
  const auto dir = scratch("checks");
  auto cfg = read_json(kConfigs / "bounds.json");
  cfg["checks"] = nlohmann::json::array();
  const auto file = write_json(dir / "bounds.json", cfg);
  CHECK(run("verify-bounds " + quoted(file) + " --out " + quoted(dir / "out")) == 2);
  cfg["checks"] = {"deviation", "bogus"};
  write_json(file, cfg);
  CHECK(run("verify-bounds " + quoted(file) + " --out " + quoted(dir / "out")) == 2);
}

TEST_CASE("shipped configs run cleanly") {
  const auto dir = scratch("shipped");
  struct Case {
    const char* command;
    const char* config;
    const char* record;
  };
  for (const auto& c : {Case{"solve-follower", "follower.json", "follower.json"},
                        Case{"solve-stripe", "stripe_m2.json", "equilibrium.json"},
                        Case{"verify-bounds", "bounds_degenerate.json", "bounds.json"},
                        Case{"scenario contract", "contract.json", "contract.json"},
                        Case{"scenario meta", "meta.json", "meta.json"}}) {
    CAPTURE(c.config);
    const auto out = dir / fs::path(c.config).stem();
    CHECK(run(std::string(c.command) + " " + quoted(kConfigs / c.config) + " --out " + quoted(out)) ==
          0);
    CHECK(fs::exists(out / c.record));
    CHECK(fs::exists(out / "run.log"));
  }
}
