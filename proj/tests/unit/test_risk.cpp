#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "../support/oracles.hpp"
#include "stripe/io.hpp"
#include "stripe/risk.hpp"

using namespace stripe;

namespace {
const EmpiricalLoss kFour({4.0, 1.0, 3.0, 2.0});
const RiskSpectrum kTwoStep({0.0, 0.5}, {0.4, 1.2});
}  // namespace

TEST_CASE("empirical loss keeps values and a sorted view") {
  CHECK(kFour.size() == 4);
  CHECK(kFour.values()[0] == 4.0);
  CHECK(kFour.sorted()[0] == 1.0);
  CHECK(kFour.sorted()[3] == 4.0);
  CHECK(kFour.mean() == doctest::Approx(2.5));
  CHECK_THROWS_AS(EmpiricalLoss({}), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalLoss({1.0, NAN}), std::invalid_argument);
}

TEST_CASE("value at risk uses the lower empirical quantile") {
  CHECK(value_at_risk(EmpiricalLoss({5, 5, 5}), 0.5) == 5.0);
  CHECK(value_at_risk(kFour, 0.5) == 3.0);
  CHECK(value_at_risk(kFour, 0.0) == 1.0);
  CHECK_THROWS_AS(value_at_risk(kFour, 1.0), std::domain_error);
  CHECK_THROWS_AS(value_at_risk(kFour, -0.1), std::domain_error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 0.999);
  for (int trial = 0; trial < 200; ++trial) {
    auto z = oracle::random_sample(rng, 1 + trial % 37);
    const double alpha = u(rng);
    CHECK(value_at_risk(EmpiricalLoss(z), alpha) == oracle::quantile(z, alpha));
  }
}

TEST_CASE("average value at risk") {
  CHECK(average_value_at_risk(kFour, 0.0) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(average_value_at_risk(kFour, 0.5) == doctest::Approx(3.5).epsilon(1e-15));
  for (double alpha : {0.0, 0.3, 0.77, 0.99})
    CHECK(average_value_at_risk(EmpiricalLoss({2.5, 2.5, 2.5}), alpha) == doctest::Approx(2.5));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.99);
  for (int trial = 0; trial < 300; ++trial) {
    auto z = oracle::random_sample(rng, 1 + trial % 50);
    const double alpha = u(rng);
    CHECK(std::abs(average_value_at_risk(EmpiricalLoss(z), alpha) -
                   oracle::avar_by_enumeration(z, alpha)) <= 1e-9);
  }
}

TEST_CASE("spectral risk") {
  std::mt19937_64 rng(7);
  auto z = oracle::random_sample(rng, 23);
  const EmpiricalLoss sample(z);
  CHECK(spectral_risk(sample, RiskSpectrum::flat()) == doctest::Approx(sample.mean()));
  CHECK(std::abs(spectral_risk(kFour, kTwoStep) - 3.1) <= 1e-12);
  CHECK(std::abs(spectral_risk(EmpiricalLoss({1.5, 1.5, 1.5}), kTwoStep) - 1.5) <= 1e-12);

  const auto w = spectral_weights(7, kTwoStep);
  double total = 0.0;
  for (double v : w) total += v;
  CHECK(std::abs(total - 1.0) <= 1e-12);
  for (std::size_t k = 1; k < w.size(); ++k) CHECK(w[k] >= w[k - 1] - 1e-15);

  for (int trial = 0; trial < 200; ++trial) {
    auto s = oracle::random_spectrum(rng, 1 + trial % 6);
    auto x = oracle::random_sample(rng, 1 + trial % 41);
    CHECK(std::abs(spectral_risk(EmpiricalLoss(x), s) - oracle::spectral_by_antiderivative(x, s)) <=
          1e-9);
  }
}

TEST_CASE("spectral risk of a finite lottery") {
  const std::vector<double> values = {3.0, 1.0, 2.0};
  const std::vector<double> probs = {0.25, 0.25, 0.5};
  // Expanded sample {1, 2, 2, 3} carries the same law.
  const EmpiricalLoss expanded({1.0, 2.0, 2.0, 3.0});
  for (const auto& s : {RiskSpectrum::flat(), kTwoStep, average_value_at_risk_spectrum(0.6)})
    CHECK(std::abs(spectral_risk(values, probs, s) - spectral_risk(expanded, s)) <= 1e-12);
  const std::vector<double> bad = {0.5, 0.6, 0.1};
  CHECK_THROWS_AS(spectral_risk(values, bad, kTwoStep), std::invalid_argument);
}

TEST_CASE("spectrum invariants") {
  CHECK_THROWS_AS(RiskSpectrum({0.1}, {1.0 / 0.9}), std::invalid_argument);
  CHECK_THROWS_AS(RiskSpectrum({0.0, 0.5}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(RiskSpectrum({0.0, 0.5, 0.4}, {0.5, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(RiskSpectrum({0.0, 0.5}, {1.2, -0.4}), std::invalid_argument);
  const RiskSpectrum zero_start({0.0, 0.5}, {0.0, 2.0});
  CHECK(zero_start.zero_mass() == 0.0);
  CHECK(kTwoStep.value(0.25) == doctest::Approx(0.4));
  CHECK(kTwoStep.value(0.5) == doctest::Approx(1.6));
  CHECK(kTwoStep.integral(0.0, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("Kusuoka atoms") {
  const auto flat = spectrum_to_kusuoka(RiskSpectrum::flat());
  REQUIRE(flat.atoms().size() == 1);
  CHECK(flat.atoms()[0].level == 0.0);
  CHECK(flat.atoms()[0].weight == 1.0);

  const auto two = spectrum_to_kusuoka(kTwoStep);
  REQUIRE(two.atoms().size() == 2);
  CHECK(two.atoms()[0].level == 0.0);
  CHECK(two.atoms()[0].weight == doctest::Approx(0.4));
  CHECK(two.atoms()[1].level == 0.5);
  CHECK(two.atoms()[1].weight == doctest::Approx(0.6));
  CHECK(std::abs(two.total_mass() - 1.0) <= 1e-12);

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = oracle::random_spectrum(rng, 1 + trial % 5);
    auto z = oracle::random_sample(rng, 2 + trial % 30);
    const EmpiricalLoss sample(z);
    CHECK(std::abs(spectrum_to_kusuoka(s).total_mass() - 1.0) <= 1e-9);
    CHECK(std::abs(kusuoka_risk(sample, spectrum_to_kusuoka(s)) - spectral_risk(sample, s)) <=
          1e-12);
  }
  CHECK_THROWS_AS(KusuokaMeasure({{0.0, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(KusuokaMeasure({{1.0, 1.0}}), std::invalid_argument);
}

TEST_CASE("step approximation of a target spectrum") {
  for (std::size_t n : {1u, 3u, 8u}) {
    const auto s = approximate_spectrum([](double) { return 1.0; }, n);
    CHECK(s.zero_mass() == doctest::Approx(1.0));
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s.jumps()[i] == doctest::Approx(0.0));
  }

  const double theta = 0.5, kappa = 0.25;
  const auto semi = mean_semideviation_spectrum(theta, kappa);
  const auto approx = approximate_spectrum([&](double t) { return semi.value(t); }, 4);
  for (double t : {0.0, 0.1, 0.3, 0.6, 0.74, 0.75, 0.9, 0.999})
    CHECK(std::abs(approx.value(t) - semi.value(t)) <= 1e-12);
  CHECK(std::abs(semi.value(0.2) - (1.0 - theta * kappa)) <= 1e-15);
  CHECK(std::abs(semi.value(0.8) - (1.0 + theta * (1.0 - kappa))) <= 1e-15);

  CHECK_THROWS_AS(approximate_spectrum([](double t) { return 2.0 - t; }, 4), std::domain_error);

  // Finer approximations of a smooth target get closer in the probe metric.
  const auto target = [](double t) { return 2.0 * t; };
  const auto reference = spectrum_to_kusuoka(approximate_spectrum(target, 1024));
  std::mt19937_64 rng(13);
  std::vector<EmpiricalLoss> probes;
  for (int i = 0; i < 20; ++i) probes.emplace_back(oracle::random_sample(rng, 64));
  double previous = INFINITY;
  for (std::size_t n : {2u, 4u, 8u, 16u}) {
    const double d =
        pseudo_metric_estimate(reference, spectrum_to_kusuoka(approximate_spectrum(target, n)), probes);
    CHECK(d <= previous + 1e-12);
    previous = d;
  }
}

TEST_CASE("pseudo-metric estimate") {
  const KusuokaMeasure mean({{0.0, 1.0}});
  const KusuokaMeasure upper({{0.5, 1.0}});
  std::vector<EmpiricalLoss> probes = {kFour};
  CHECK(pseudo_metric_estimate(mean, mean, probes) == 0.0);
  CHECK(std::abs(pseudo_metric_estimate(mean, upper, probes) - 1.0) <= 1e-12);
  const double small = pseudo_metric_estimate(mean, upper, probes);
  probes.emplace_back(std::vector<double>{0.0, 10.0});
  CHECK(pseudo_metric_estimate(mean, upper, probes) >= small);
}

TEST_CASE("dual representation") {
  CHECK(std::abs(dual_representation_check(kFour, 0.5) - 3.5) <= 1e-12);
  CHECK(std::abs(dual_representation_check(kFour, 0.0) - 2.5) <= 1e-12);
  CHECK(std::abs(dual_representation_check(EmpiricalLoss({7, 7, 7}), 0.4) - 7.0) <= 1e-12);
}

TEST_CASE("built-in spectra") {
  const auto avar = average_value_at_risk_spectrum(0.5);
  CHECK(std::abs(spectral_risk(kFour, avar) - 3.5) <= 1e-12);
  CHECK(average_value_at_risk_spectrum(0.0).size() == 1);
  const auto semi = mean_semideviation_spectrum(0.3, 0.4);
  CHECK(std::abs(semi.integral(0.0, 1.0) - 1.0) <= 1e-12);
  std::mt19937_64 rng(17);
  auto z = oracle::random_sample(rng, 40);
  const EmpiricalLoss sample(z);
  CHECK(spectral_risk(sample, semi) >= sample.mean() - 1e-12);
}

TEST_CASE("spectrum records round-trip exactly") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = oracle::random_spectrum(rng, 1 + trial % 7);
    const auto back = parse_spectrum(dump_spectrum(s));
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(back.breakpoints()[i] == s.breakpoints()[i]);
      CHECK(back.jumps()[i] == s.jumps()[i]);
    }
  }
  const auto avar = spectrum_from_json(nlohmann::json{{"kind", "avar"}, {"level", 0.8}});
  CHECK(avar.breakpoints()[1] == 0.8);
  CHECK_THROWS_AS(spectrum_from_json(nlohmann::json{{"kind", "nope"}}), std::invalid_argument);
  CHECK_THROWS(parse_spectrum("[[0.0, 0.5]]"));
}
