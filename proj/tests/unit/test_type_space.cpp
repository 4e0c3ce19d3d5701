#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "../support/oracles.hpp"
#include "stripe/io.hpp"
#include "stripe/type_space.hpp"

using namespace stripe;

TEST_CASE("type distribution validation and constructors") {
  CHECK_THROWS_AS(TypeDistribution({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(TypeDistribution({1.2, -0.2}), std::invalid_argument);
  const auto p = TypeDistribution::point_mass(3, 1);
  CHECK(p[1] == 1.0);
  CHECK(p[0] == 0.0);
  const auto u = TypeDistribution::uniform(4);
  CHECK(u[2] == doctest::Approx(0.25));
  const auto m = TypeDistribution::mixture(p, TypeDistribution::uniform(3), 0.25);
  CHECK(m[1] == doctest::Approx(0.25 + 0.75 / 3));
}

TEST_CASE("type space validation") {
  CHECK_THROWS(TypeSpace({1.0, 0.0}, {RiskSpectrum::flat(), RiskSpectrum::flat()}));
  CHECK_THROWS(TypeSpace({0.0}, {RiskSpectrum::flat(), RiskSpectrum::flat()}));
  const TypeSpace ts({0.0, 1.0}, {RiskSpectrum({0.0, 0.5}, {1.0, 0.0}),
                                  RiskSpectrum({0.0, 0.3}, {0.4, 0.6 / 0.7})});
  CHECK(ts.common_grid() == std::vector<double>{0.0, 0.3, 0.5});
  CHECK(ts.grid_jumps(1)[2] == 0.0);
}

TEST_CASE("equivalent spectrum") {
  const RiskSpectrum a({0.0, 0.5}, {1.0, 0.0});
  const RiskSpectrum b({0.0, 0.5}, {0.4, 1.2});
  const TypeSpace ts({0.0, 1.0}, {a, b});

  const auto point = equivalent_spectrum(ts, TypeDistribution::point_mass(2, 1));
  for (double t : {0.0, 0.2, 0.5, 0.9}) CHECK(point.value(t) == doctest::Approx(b.value(t)));

  const auto half = equivalent_spectrum(ts, TypeDistribution({0.5, 0.5}));
  REQUIRE(half.size() == 2);
  CHECK(std::abs(half.jumps()[0] - 0.7) <= 1e-12);
  CHECK(std::abs(half.jumps()[1] - 0.6) <= 1e-12);

  const TypeSpace flats({0.0, 2.0}, {RiskSpectrum::flat(), RiskSpectrum::flat()});
  const auto f = equivalent_spectrum(flats, TypeDistribution({0.3, 0.7}));
  for (double t : {0.0, 0.4, 0.99}) CHECK(f.value(t) == doctest::Approx(1.0));

  CHECK_THROWS(equivalent_spectrum(ts, TypeDistribution::uniform(3)));

  // Affine in mu: the spectrum of a mixture is the mixture of spectra.
  std::mt19937_64 rng(23);
  const TypeSpace rich({0.0, 1.0, 2.5},
                       {oracle::random_spectrum(rng, 3), oracle::random_spectrum(rng, 4),
                        oracle::random_spectrum(rng, 2)});
  for (int trial = 0; trial < 50; ++trial) {
    const TypeDistribution m1(oracle::random_simplex_point(rng, 3));
    const TypeDistribution m2(oracle::random_simplex_point(rng, 3));
    const double r = std::uniform_real_distribution<double>(0, 1)(rng);
    const auto mix = equivalent_spectrum(rich, TypeDistribution::mixture(m1, m2, r));
    const auto s1 = equivalent_spectrum(rich, m1);
    const auto s2 = equivalent_spectrum(rich, m2);
    for (double t = 0.0; t < 1.0; t += 0.037)
      CHECK(std::abs(mix.value(t) - (r * s1.value(t) + (1 - r) * s2.value(t))) <= 1e-12);
  }
}

TEST_CASE("Wasserstein-1 on the line") {
  const TypeSpace ts({0.0, 1.0, 3.0},
                     {RiskSpectrum::flat(), RiskSpectrum::flat(), RiskSpectrum::flat()});
  const TypeDistribution mu({0.5, 0.5, 0.0});
  const TypeDistribution nu({0.0, 0.5, 0.5});
  CHECK(wasserstein1(mu, mu, ts) == 0.0);
  CHECK(std::abs(wasserstein1(mu, nu, ts) - 1.5) <= 1e-12);
  CHECK(std::abs(wasserstein1(TypeDistribution::point_mass(3, 0), TypeDistribution::point_mass(3, 1),
                              ts) -
                 1.0) <= 1e-15);

  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + trial % 4;
    std::vector<double> theta(m);
    double at = 0.0;
    for (auto& t : theta) t = (at += 0.1 + u(rng));
    const auto a = oracle::random_simplex_point(rng, m);
    const auto b = oracle::random_simplex_point(rng, m);
    const auto c = oracle::random_simplex_point(rng, m);
    const double ab = wasserstein1(a, b, theta);
    CHECK(std::abs(ab - oracle::transport_cost(a, b, theta)) <= 1e-8);
    CHECK(std::abs(ab - wasserstein1(b, a, theta)) <= 1e-15);
    CHECK(wasserstein1(a, a, theta) <= 1e-12);
    CHECK(ab <= wasserstein1(a, c, theta) + wasserstein1(c, b, theta) + 1e-12);
  }
}

TEST_CASE("Wasserstein-1 subgradient") {
  const std::vector<double> theta = {0.0, 1.0, 3.0, 3.5};
  const std::vector<double> mu = {0.1, 0.2, 0.3, 0.4};
  for (double g : wasserstein1_subgradient(mu, mu, theta)) CHECK(g == 0.0);

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = oracle::random_simplex_point(rng, 4);
    const auto b = oracle::random_simplex_point(rng, 4);
    const auto g = wasserstein1_subgradient(a, b, theta);
    const double h = 1e-7;
    for (std::size_t m = 0; m < 4; ++m) {
      auto up = a, down = a;
      up[m] += h;
      down[m] -= h;
      const double fd = (wasserstein1(up, b, theta) - wasserstein1(down, b, theta)) / (2 * h);
      CHECK(std::abs(fd - g[m]) <= 1e-5);
    }
    // At mu = nu the function is minimal, so moving toward nu cannot increase it.
    const auto g_at = wasserstein1_subgradient(b, b, theta);
    double dir = 0.0;
    for (std::size_t m = 0; m < 4; ++m) dir += g_at[m] * (a[m] - b[m]);
    CHECK(dir <= 0.0);
  }
}

TEST_CASE("simplex projection") {
  const auto same = simplex_project(std::vector<double>{0.2, 0.3, 0.5});
  CHECK(same[0] == doctest::Approx(0.2));
  CHECK(same[2] == doctest::Approx(0.5));
  const auto vertex = simplex_project(std::vector<double>{2.0, 0.0});
  CHECK(vertex[0] == doctest::Approx(1.0));
  CHECK(vertex[1] == doctest::Approx(0.0));
  const auto p = simplex_project(std::vector<double>{0.8, 0.6, -0.2});
  CHECK(std::abs(p[0] - 0.6) <= 1e-12);
  CHECK(std::abs(p[1] - 0.4) <= 1e-12);
  CHECK(p[2] == 0.0);

  std::mt19937_64 rng(37);
  std::normal_distribution<double> g(0.0, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(2 + trial % 5);
    for (auto& x : v) x = g(rng);
    const auto proj = simplex_project(v);
    const auto ref = oracle::simplex_projection(v);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(proj[i] - ref[i]) <= 1e-9);
    const auto again = simplex_project(proj.weights());
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(again[i] - proj[i]) <= 1e-12);
  }
}

TEST_CASE("simplex lattice") {
  const auto lattice = simplex_lattice(3, 4);
  CHECK(lattice.size() == 15);
  for (const auto& mu : lattice) {
    double s = 0.0;
    for (double w : mu.weights()) s += w;
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
  CHECK(simplex_lattice(2, 200).size() == 201);
}

TEST_CASE("type space records round-trip") {
  const TypeSpace ts({0.0, 1.5}, {RiskSpectrum::flat(), average_value_at_risk_spectrum(0.7)});
  const auto back = type_space_from_json(type_space_to_json(ts));
  CHECK(back.size() == 2);
  CHECK(back.locations()[1] == 1.5);
  CHECK(back.spectrum(1).breakpoints()[1] == 0.7);
  CHECK(back.spectrum(1).jumps()[1] == ts.spectrum(1).jumps()[1]);
}
