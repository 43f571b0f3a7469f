#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "panda/rate_theory.hpp"
#include "panda/rng.hpp"

using namespace panda;

TEST_CASE("step size interval hand values") {
  StepSizeInterval unit = step_size_interval(1.0, 1.0, 0.0);
  CHECK(unit.lower == 0.0);
  CHECK(unit.upper == doctest::Approx(0.5).epsilon(1e-14));

  StepSizeInterval skewed = step_size_interval(1.0, 4.0, 0.5);
  CHECK(skewed.upper == doctest::Approx(0.0625).epsilon(1e-14));

  CHECK(step_size_interval(1.0, 1.0, 0.999).upper <= 1e-5);
  CHECK_THROWS_WITH_AS(step_size_interval(1.0, 1.0, 1.0), "no contraction", std::invalid_argument);
}

TEST_CASE("crossover step size from the intersection root") {
  for (int B : {1, 2, 5}) {
    CHECK(crossover_lambda_pow_B(1.0, 1.0, 0.0) == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
    CHECK(crossover_c(1.0, 1.0, 0.0, B) == doctest::Approx(0.4).epsilon(1e-10));
  }

  // At the root, the lower bound 2L(1 - lambda^{2B}) meets the upper bound.
  const double u = crossover_lambda_pow_B(3.0, 7.0, 0.25);
  const double c_bar = crossover_c(3.0, 7.0, 0.25, 2);
  CHECK(2.0 * 7.0 * (1.0 - u * u) == doctest::Approx(c_bar).epsilon(1e-10));
  CHECK(u > 0.25);
  CHECK(u < 1.0);

  const double c_tiny = crossover_c(1.0, 1.0, 0.999, 1);
  CHECK(c_tiny <= 1e-4);
  CHECK(crossover_lambda_pow_B(1.0, 1.0, 0.999) >= 0.999);
}

TEST_CASE("closed-form crossover candidates disagree with the intersection") {
  // Both candidate exponents evaluate to 0.24 at kappa = 1, delta = 0 while
  // the intersection gives 0.4; that mismatch is why the numeric root is the
  // source of truth.
  CHECK(crossover_c_closed_form(1.0, 1.0, 0.0, 1.5) == doctest::Approx(0.24).epsilon(1e-12));
  CHECK(crossover_c_closed_form(1.0, 1.0, 0.0, 2.5) == doctest::Approx(0.24).epsilon(1e-12));
  CHECK(std::abs(crossover_c_closed_form(1.0, 1.0, 0.0, 1.5) - crossover_c(1.0, 1.0, 0.0, 1)) > 0.1);
}

TEST_CASE("rate branches produce the hand values") {
  CHECK(theoretical_lambda(0.1, 1.0, 1.0, 0.0, 1) == doctest::Approx(std::sqrt(0.95)).epsilon(1e-12));
  CHECK(theoretical_lambda(0.45, 1.0, 1.0, 0.0, 1) == doctest::Approx(std::sqrt(0.9)).epsilon(1e-12));
  CHECK(theoretical_lambda(1e-9, 1.0, 1.0, 0.0, 1) > 1.0 - 1e-9);
  CHECK_THROWS_WITH_AS(theoretical_lambda(0.51, 1.0, 1.0, 0.0, 1), "step size infeasible",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(theoretical_lambda(0.0, 1.0, 1.0, 0.0, 1), "step size infeasible",
                       std::invalid_argument);
}

TEST_CASE("rate is continuous at the crossover and stays in (delta^(1/B), 1)") {
  SeededRng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const double mu = 0.1 + 2.0 * rng.uniform01();
    const double L = mu * (1.0 + 9.0 * rng.uniform01());
    const double delta = 0.95 * rng.uniform01();
    const int B = 1 + static_cast<int>(rng.next_u64() % 4);
    const double c_bar = crossover_c(mu, L, delta, B);
    const double upper = step_size_interval(mu, L, delta).upper;
    REQUIRE(c_bar > 0.0);
    REQUIRE(c_bar < upper);

    const double below = theoretical_lambda(c_bar * (1.0 - 1e-10), mu, L, delta, B);
    const double above = theoretical_lambda(std::min(c_bar * (1.0 + 1e-10), 0.5 * (c_bar + upper)), mu,
                                            L, delta, B);
    CHECK(std::abs(below - above) <= 1e-8);

    const double c = upper * (0.01 + 0.98 * rng.uniform01());
    const double lambda = theoretical_lambda(c, mu, L, delta, B);
    CHECK(lambda > std::pow(delta, 1.0 / B));
    CHECK(lambda < 1.0);
  }
}

TEST_CASE("rate decreases up to the crossover and increases past it") {
  const double mu = 0.8;
  const double L = 2.4;
  const double delta = 0.3;
  const int B = 2;
  const double c_bar = crossover_c(mu, L, delta, B);
  const double upper = step_size_interval(mu, L, delta).upper;

  double previous = 1.0;
  for (int i = 1; i <= 50; ++i) {
    const double lambda = theoretical_lambda(c_bar * i / 50.0, mu, L, delta, B);
    CHECK(lambda <= previous + 1e-14);
    previous = lambda;
  }
  previous = theoretical_lambda(c_bar, mu, L, delta, B);
  for (int i = 1; i <= 50; ++i) {
    const double c = c_bar + (upper - c_bar) * i / 51.0;
    const double lambda = theoretical_lambda(c, mu, L, delta, B);
    CHECK(lambda >= previous - 1e-14);
    previous = lambda;
  }
}

TEST_CASE("small gain certificate gains and feasibility") {
  RateCertificate cert = small_gain_certificate(0.99, 0.01, 1.0, 1.0, 0.0, 1);
  CHECK(cert.gains[0] == doctest::Approx(1.0 / 0.99).epsilon(1e-14));
  CHECK(cert.gains[1] == doctest::Approx(2.0 / 0.99).epsilon(1e-14));
  CHECK(cert.gains[2] == 0.01);
  CHECK(cert.gains[3] == doctest::Approx(1.0 / 0.99).epsilon(1e-14));
  CHECK(cert.gains[4] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(cert.product() == doctest::Approx(0.0206143).epsilon(1e-4));
  CHECK(cert.feasible);

  CHECK_THROWS_WITH_AS(small_gain_certificate(0.5, 0.01, 1.0, 1.0, 0.5, 1), "arrows A2/A4 undefined",
                       std::invalid_argument);
}

TEST_CASE("gamma_3 equals the step size for any inputs") {
  SeededRng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const double mu = 0.1 + rng.uniform01();
    const double L = mu * (1.0 + 5.0 * rng.uniform01());
    const double delta = 0.9 * rng.uniform01();
    const double lambda = std::pow(delta, 1.0) + (1.0 - delta) * (0.5 + 0.49 * rng.uniform01());
    const double c = 0.3 * mu * rng.uniform01();
    RateCertificate cert = small_gain_certificate(std::min(lambda, 0.9999), c, mu, L, delta, 1);
    CHECK(cert.gains[2] == c);
  }
}

TEST_CASE("certificates with conservative steps are feasible") {
  // With the branch rate, the exact gain product stays below one whenever
  // c <= min(crossover, upper/B^2)/2; larger steps can push the product
  // past one even inside the admissible interval (see the next case), so
  // the sound region is the conservative one.
  SeededRng rng(29);
  for (int trial = 0; trial < 1000; ++trial) {
    const double mu = 0.05 + 2.0 * rng.uniform01();
    const double L = mu * (1.0 + 19.0 * rng.uniform01());
    const double delta = 0.9 * rng.uniform01();
    const int B = 1 + static_cast<int>(rng.next_u64() % 5);
    const double upper = step_size_interval(mu, L, delta).upper;
    const double c_bar = crossover_c(mu, L, delta, B);
    const double cap = 0.5 * std::min(c_bar, upper / (B * B));
    const double c = cap * (0.01 + 0.99 * rng.uniform01());

    const double lambda = theoretical_lambda(c, mu, L, delta, B);
    RateCertificate cert = small_gain_certificate(lambda, c, mu, L, delta, B);
    CHECK(cert.feasible);
    CHECK(cert.product() < 1.0);
  }
}

TEST_CASE("the upper rate branch sits on the gain-product boundary") {
  // Past the crossover the branch rate makes the product equal 1/lambda > 1,
  // so those certificates are reported infeasible rather than papered over.
  const double lambda = theoretical_lambda(0.45, 1.0, 1.0, 0.0, 1);
  RateCertificate cert = small_gain_certificate(lambda, 0.45, 1.0, 1.0, 0.0, 1);
  CHECK(cert.product() == doctest::Approx(1.0 / lambda).epsilon(1e-12));
  CHECK_FALSE(cert.feasible);
}
