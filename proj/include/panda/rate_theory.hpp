#pragma once

#include <array>

namespace panda {

struct StepSizeInterval {
  double lower = 0.0;  // open at both ends
  double upper = 0.0;
};

// Admissible dual step sizes (0, mu (1-delta)^2 / (2 sqrt(kappa))).
StepSizeInterval step_size_interval(double mu, double L, double delta);

// Root lambda_c^B of the quadratic where the geometric lower bound
// 2L(1 - lambda^{2B}) meets the upper bound mu (lambda^B - delta)^2 /
// (2 sqrt(kappa)). Lies strictly inside (delta, 1).
double crossover_lambda_pow_B(double mu, double L, double delta);

// Step size at which the two rate branches intersect, computed from the
// intersection root rather than a closed form. Independent of B.
double crossover_c(double mu, double L, double delta, int B);

// Closed-form crossover candidates (mu/2)(16 kappa^e - 4 kappa (1 - delta^2))
// / (1 + 4 kappa^{3/2})^2 for e in {3/2, 5/2}. Kept for comparison behind the
// CLI debug flag; they disagree with each other and with the intersection
// value, which is why crossover_c does not use them.
double crossover_c_closed_form(double mu, double L, double delta, double kappa_exponent);

// Certified decay rate for a step size inside the admissible interval:
// (1 - c/(2L))^{1/(2B)} up to the crossover, (delta + sqrt(2 c sqrt(kappa) /
// mu))^{1/B} beyond it.
double theoretical_lambda(double c, double mu, double L, double delta, int B);

struct RateCertificate {
  double mu = 0.0;
  double L = 0.0;
  double kappa = 1.0;
  double delta = 0.0;
  int B = 1;
  double c = 0.0;
  double lambda = 0.0;
  std::array<double, 5> gains{};  // gamma_1 .. gamma_5 around the cycle
  double crossover_c = 0.0;
  bool feasible = false;

  double product() const { return gains[0] * gains[1] * gains[2] * gains[3] * gains[4]; }
};

// Small-gain cycle gains at (lambda, c):
//   gamma_1 = 1/(mu lambda)
//   gamma_2 = 2 (1 - lambda^B) / ((1 - lambda)(lambda^B - delta))
//   gamma_3 = c
//   gamma_4 = (1 - lambda^B) / (mu (1 - lambda)(lambda^B - delta))
//   gamma_5 = sqrt(L mu)
// feasible requires the exact gain product below one together with
// c <= mu/2 and lambda >= sqrt(1 - c/(2L)).
RateCertificate small_gain_certificate(double lambda, double c, double mu, double L, double delta,
                                       int B);

}  // namespace panda
