#include "panda/rate_theory.hpp"

#include <cmath>
#include <stdexcept>

namespace panda {

namespace {

void require_constants(double mu, double L, double delta) {
  if (!(mu > 0.0) || !(L >= mu)) throw std::invalid_argument("invalid curvature constants");
  if (delta < 0.0) throw std::invalid_argument("contraction factor must be nonnegative");
  if (delta >= 1.0) throw std::invalid_argument("no contraction");
}

}  // namespace

StepSizeInterval step_size_interval(double mu, double L, double delta) {
  require_constants(mu, L, delta);
  const double kappa = L / mu;
  return {0.0, mu * (1.0 - delta) * (1.0 - delta) / (2.0 * std::sqrt(kappa))};
}

double crossover_lambda_pow_B(double mu, double L, double delta) {
  require_constants(mu, L, delta);
  const double kappa = L / mu;
  const double k32 = 4.0 * std::pow(kappa, 1.5);
  const double root = std::sqrt(delta * delta + (k32 - delta * delta) * (1.0 + k32));
  return (delta + root) / (1.0 + k32);
}

double crossover_c(double mu, double L, double delta, int B) {
  if (B < 1) throw std::invalid_argument("window length must be at least 1");
  const double u = crossover_lambda_pow_B(mu, L, delta);
  const double kappa = L / mu;
  return mu * (u - delta) * (u - delta) / (2.0 * std::sqrt(kappa));
}

double crossover_c_closed_form(double mu, double L, double delta, double kappa_exponent) {
  require_constants(mu, L, delta);
  const double kappa = L / mu;
  const double denom = 1.0 + 4.0 * std::pow(kappa, 1.5);
  return 0.5 * mu * (16.0 * std::pow(kappa, kappa_exponent) - 4.0 * kappa * (1.0 - delta * delta)) /
         (denom * denom);
}

double theoretical_lambda(double c, double mu, double L, double delta, int B) {
  if (B < 1) throw std::invalid_argument("window length must be at least 1");
  const StepSizeInterval interval = step_size_interval(mu, L, delta);
  if (!(c > interval.lower) || !(c < interval.upper)) {
    throw std::invalid_argument("step size infeasible");
  }
  const double kappa = L / mu;
  const double c_bar = crossover_c(mu, L, delta, B);
  if (c <= c_bar) {
    return std::pow(1.0 - c / (2.0 * L), 1.0 / (2.0 * B));
  }
  return std::pow(delta + std::sqrt(2.0 * c * std::sqrt(kappa) / mu), 1.0 / B);
}

RateCertificate small_gain_certificate(double lambda, double c, double mu, double L, double delta,
                                       int B) {
  if (B < 1) throw std::invalid_argument("window length must be at least 1");
  require_constants(mu, L, delta);
  if (!(lambda > 0.0) || !(lambda < 1.0)) throw std::invalid_argument("rate must lie in (0, 1)");
  const double lambda_B = std::pow(lambda, B);
  if (lambda_B <= delta) throw std::invalid_argument("arrows A2/A4 undefined");

  RateCertificate cert;
  cert.mu = mu;
  cert.L = L;
  cert.kappa = L / mu;
  cert.delta = delta;
  cert.B = B;
  cert.c = c;
  cert.lambda = lambda;
  cert.crossover_c = crossover_c(mu, L, delta, B);

  const double geometric_sum = (1.0 - lambda_B) / (1.0 - lambda);
  cert.gains[0] = 1.0 / (mu * lambda);
  cert.gains[1] = 2.0 * geometric_sum / (lambda_B - delta);
  cert.gains[2] = c;
  cert.gains[3] = geometric_sum / (mu * (lambda_B - delta));
  cert.gains[4] = std::sqrt(L * mu);

  cert.feasible = cert.product() < 1.0 && c > 0.0 && c <= 0.5 * mu &&
                  lambda >= std::sqrt(1.0 - c / (2.0 * L));
  return cert;
}

}  // namespace panda
