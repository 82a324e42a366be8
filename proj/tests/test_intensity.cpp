#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "vlcsec/intensity.hpp"
#include "vlcsec/oracles.hpp"

using namespace vlcsec;

namespace {
// Bisection values frozen from an independent root-finder run.
constexpr double kMu01 = 9.9954411338148422;
constexpr double kMu02 = 4.8010075497225175;
constexpr double kMu025 = 3.5935119694474261;
constexpr double kMu03 = 2.6721038552733857;
constexpr double kMu04 = 1.2299332003819572;
constexpr double kUniformEntropyPower = 0.23419932609727664;  // 2 / (pi e)
}  // namespace

TEST_CASE("mean map endpoints and monotonicity") {
  CHECK(mean_ratio(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mean_ratio(50.0) < 0.03);
  CHECK(mean_ratio(-50.0) > 0.97);
  double prev = mean_ratio(-20.0);
  for (double mu = -19.5; mu <= 20.0; mu += 0.5) {
    const double cur = mean_ratio(mu);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("solve_mu known roots") {
  CHECK(solve_mu(0.5) == 0.0);
  CHECK(solve_mu(0.1) == doctest::Approx(kMu01).epsilon(1e-11));
  CHECK(solve_mu(0.2) == doctest::Approx(kMu02).epsilon(1e-11));
  CHECK(solve_mu(0.25) == doctest::Approx(kMu025).epsilon(1e-11));
  CHECK(solve_mu(0.3) == doctest::Approx(kMu03).epsilon(1e-11));
  CHECK(solve_mu(0.4) == doctest::Approx(kMu04).epsilon(1e-11));
}

TEST_CASE("solve_mu inverts the mean map and respects the sign rule") {
  for (double a : {0.05, 0.2, 0.35, 0.49, 0.51, 0.7, 0.95}) {
    const double mu = solve_mu(a);
    CHECK(std::abs(mean_ratio(mu) - a) < 1e-11);
    if (a < 0.5) CHECK(mu > 0.0);
    if (a > 0.5) CHECK(mu < 0.0);
  }
}

TEST_CASE("solve_mu antisymmetry: mu(1 - a) = -mu(a)") {
  for (double a : {0.1, 0.2, 0.3, 0.45}) {
    CHECK(solve_mu(1.0 - a) == doctest::Approx(-solve_mu(a)).epsilon(1e-10));
  }
  CHECK(solve_mu(0.8) == doctest::Approx(-kMu02).epsilon(1e-11));
}

TEST_CASE("solve_mu rejects out-of-range alpha") {
  CHECK_THROWS_AS(solve_mu(0.0), std::domain_error);
  CHECK_THROWS_AS(solve_mu(1.0), std::domain_error);
  CHECK_THROWS_AS(solve_mu(-0.2), std::domain_error);
}

TEST_CASE("uniform limit of the coefficient formulas") {
  CHECK(entropy_power_coeff(1.0, 0.5, 0.0) ==
        doctest::Approx(kUniformEntropyPower).epsilon(1e-12));
  CHECK(variance_coeff(1.0, 0.5, 0.0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("series branch is continuous across the threshold") {
  // |mu| ~ 1e-4 is where the closed form hands over to the expansion.
  for (double mu : {1e-5, 9.9e-5, 1.01e-4, 2e-4, -1e-5, -2e-4}) {
    const double a = mean_ratio(mu);
    CHECK(entropy_power_coeff(1.0, a, mu) ==
          doctest::Approx(kUniformEntropyPower).epsilon(1e-6));
    CHECK(variance_coeff(1.0, a, mu) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  }
}

TEST_CASE("peak amplitude enters as A^2") {
  const double mu = solve_mu(0.3);
  for (double A : {0.5, 2.0, 7.0}) {
    CHECK(entropy_power_coeff(A, 0.3, mu) ==
          doctest::Approx(A * A * entropy_power_coeff(1.0, 0.3, mu))
              .epsilon(1e-13));
    CHECK(variance_coeff(A, 0.3, mu) ==
          doctest::Approx(A * A * variance_coeff(1.0, 0.3, mu))
              .epsilon(1e-13));
  }
}

TEST_CASE("frozen coefficient values at alpha = 0.3, A = 1") {
  const double mu = solve_mu(0.3);
  CHECK(entropy_power_coeff(1.0, 0.3, mu) ==
        doctest::Approx(0.14124294864517012).epsilon(1e-11));
  CHECK(variance_coeff(1.0, 0.3, mu) ==
        doctest::Approx(0.24122087813226013).epsilon(1e-11));
}

TEST_CASE("quadrature agreement for entropy power and variance") {
  for (double a : {0.1, 0.25, 0.4, 0.5, 0.6, 0.9}) {
    const double mu = solve_mu(a);
    const double p = entropy_power_coeff(1.0, a, mu);
    const double v = variance_coeff(1.0, a, mu);
    CHECK(std::abs(p - oracle_entropy_power(1.0, a)) <= 1e-6 * p);
    CHECK(std::abs(v - oracle_variance(1.0, a)) <= 1e-6 * v);
  }
}

TEST_CASE("build_profile aggregates per-entry values") {
  Vector alpha(2);
  alpha << 0.5, 0.5;
  const auto prof = build_profile(1.0, alpha);
  CHECK(prof.p[0] == doctest::Approx(kUniformEntropyPower).epsilon(1e-8));
  CHECK(prof.p[1] == doctest::Approx(kUniformEntropyPower).epsilon(1e-8));
  CHECK(prof.v[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
  CHECK(prof.beta[0] == doctest::Approx(0.0));

  Vector one(1);
  one << 0.5;
  const auto scaled = build_profile(2.0, one);
  CHECK(scaled.p[0] == doctest::Approx(4.0 * kUniformEntropyPower).epsilon(1e-8));
  CHECK(scaled.v[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-8));

  Vector mirrored(2);
  mirrored << 0.3, 0.7;
  const auto sym = build_profile(1.0, mirrored);
  CHECK(sym.p[0] == doctest::Approx(sym.p[1]).epsilon(1e-12));
  CHECK(sym.v[0] == doctest::Approx(sym.v[1]).epsilon(1e-12));
  CHECK(sym.mu[0] == doctest::Approx(-sym.mu[1]).epsilon(1e-10));
}

TEST_CASE("profile invariants over random alpha draws") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(0.01, 0.99);
  const double A = 1.7;
  for (int t = 0; t < 200; ++t) {
    const double a = dist(rng);
    Vector alpha(2);
    alpha << a, 1.0 - a;
    const auto prof = build_profile(A, alpha);
    for (int i = 0; i < 2; ++i) {
      CHECK(prof.p[i] > 0.0);
      CHECK(prof.p[i] <= prof.v[i] + 1e-12);
      CHECK(prof.v[i] <= A * A + 1e-12);
    }
    CHECK(std::abs(prof.p[0] - prof.p[1]) < 1e-10 * A * A);
    CHECK(std::abs(prof.v[0] - prof.v[1]) < 1e-10 * A * A);
  }
}

TEST_CASE("build_profile names the offending entry") {
  Vector alpha(2);
  alpha << 0.5, 1.2;
  CHECK_THROWS(build_profile(1.0, alpha));
  CHECK_THROWS(build_profile(-1.0, Vector::Constant(1, 0.5)));
}
