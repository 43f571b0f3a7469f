#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "panda/algorithms.hpp"
#include "panda/objectives.hpp"
#include "panda/rate_theory.hpp"

namespace panda {

// Removes the consensus component of per-node columns: X - mean(X) 1^T.
Eigen::MatrixXd consensus_residual(const Eigen::MatrixXd& columns);

// Scalar sequences the convergence analysis tracks along a dual-ascent run:
//   r(k)     = ||y(k) - y*||
//   xperp(k) = ||(I - averaging) x(k)||   (blockwise centering)
//   zperp(k) = ||(I - averaging) z(k)||
//   dy(k)    = ||y(k) - y(k-1)||, dy(0) = 0
//   dxz(k)   = ||xperp(k) - zperp(k) components||, i.e. the centered x - z gap
struct DerivedSequences {
  std::vector<double> r;
  std::vector<double> xperp;
  std::vector<double> zperp;
  std::vector<double> dy;
  std::vector<double> dxz;

  std::size_t length() const { return r.size(); }
};

DerivedSequences derived_sequences(const Trace& trace, const OptimalPair& opt);

// sup over k = 0..K of lambda^{-k} seq(k).
double weighted_sup_norm(std::span<const double> sequence, double lambda, std::size_t K);

struct ArrowSlack {
  int arrow = 0;  // 1..5 around the cycle r -> xperp -> dxz -> dy -> zperp -> r
  std::string source;
  std::string target;
  double gain = 0.0;
  double omega = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs; nonnegative when the bound holds
};

// Evaluates each cycle inequality on realized sequences at the certificate's
// (lambda, c, mu, L, delta, B), up to horizon K. omega_2 and omega_4 come
// from the first B entries of dxz and zperp.
std::array<ArrowSlack, 5> arrow_slacks(const DerivedSequences& seqs, const RateCertificate& cert,
                                       std::size_t K);

std::array<ArrowSlack, 5> arrow_slacks(const Trace& trace, const OptimalPair& opt,
                                       const RateCertificate& cert, std::size_t K);

// Bound on the weighted norm of the cycle's first sequence when the gain
// product is below one:
//   (omega_1 g2 g3 g4 g5 + omega_2 g3 g4 g5 + ... + omega_5) / (1 - g1...g5).
double small_gain_bound(const std::array<double, 5>& gains, const std::array<double, 5>& omegas);

}  // namespace panda
