#include "panda/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace panda {

Eigen::MatrixXd consensus_residual(const Eigen::MatrixXd& columns) {
  return columns.colwise() - columns.rowwise().mean().eval();
}

DerivedSequences derived_sequences(const Trace& trace, const OptimalPair& opt) {
  if (trace.meta.algorithm != "panda") {
    throw std::invalid_argument("derived sequences require a panda trace");
  }
  if (trace.states.empty()) throw std::invalid_argument("empty trace");
  if (opt.y_star.size() == 0) throw std::invalid_argument("missing optimum");

  DerivedSequences seqs;
  const std::size_t len = trace.states.size();
  seqs.r.reserve(len);
  seqs.xperp.reserve(len);
  seqs.zperp.reserve(len);
  seqs.dy.reserve(len);
  seqs.dxz.reserve(len);

  for (std::size_t k = 0; k < len; ++k) {
    const AlgorithmState& state = trace.states[k];
    seqs.r.push_back((state.y - opt.y_star).norm());
    const Eigen::MatrixXd x_residual = consensus_residual(state.x);
    const Eigen::MatrixXd z_residual = consensus_residual(state.z);
    seqs.xperp.push_back(x_residual.norm());
    seqs.zperp.push_back(z_residual.norm());
    seqs.dxz.push_back((x_residual - z_residual).norm());
    seqs.dy.push_back(k == 0 ? 0.0 : (state.y - trace.states[k - 1].y).norm());
  }
  return seqs;
}

double weighted_sup_norm(std::span<const double> sequence, double lambda, std::size_t K) {
  if (sequence.empty()) throw std::invalid_argument("empty sequence");
  if (!(lambda > 0.0) || lambda > 1.0) throw std::invalid_argument("rate must lie in (0, 1]");
  if (K >= sequence.size()) throw std::invalid_argument("horizon exceeds the sequence");
  double sup = 0.0;
  for (std::size_t k = 0; k <= K; ++k) {
    sup = std::max(sup, std::pow(lambda, -static_cast<double>(k)) * sequence[k]);
  }
  return sup;
}

std::array<ArrowSlack, 5> arrow_slacks(const DerivedSequences& seqs, const RateCertificate& cert,
                                       std::size_t K) {
  const std::size_t B = static_cast<std::size_t>(cert.B);
  if (seqs.length() == 0) throw std::invalid_argument("empty sequence");
  if (K >= seqs.length()) throw std::invalid_argument("horizon exceeds the sequence");
  if (K < B) throw std::invalid_argument("horizon shorter than the window");
  const double lambda = cert.lambda;
  const double lambda_B = std::pow(lambda, cert.B);
  if (!(lambda > 0.0) || !(lambda < 1.0) || lambda_B <= cert.delta) {
    throw std::invalid_argument("arrows A2/A4 undefined");
  }

  // Startup terms. The centered x - z recursion behind arrow 2 is exact for
  // every index, so its startup sum covers the first B entries. The z
  // recursion behind arrow 4 converts primal differences into dual
  // differences, which needs x(t) to come from a dual iterate and so only
  // holds from t = 1; its startup sum therefore covers entries 0..B.
  double omega2 = 0.0;
  double omega4 = 0.0;
  for (std::size_t t = 1; t <= B; ++t) {
    const double weight = std::pow(lambda, 1.0 - static_cast<double>(t));
    omega2 += weight * seqs.dxz[t - 1];
    omega4 += weight * seqs.zperp[t - 1];
  }
  omega4 += std::pow(lambda, -static_cast<double>(B)) * seqs.zperp[B];
  const double startup_factor = lambda_B / (lambda_B - cert.delta);
  omega2 *= startup_factor;
  omega4 *= startup_factor;
  const double omega5 = 2.0 * seqs.r.front();

  const double r_norm = weighted_sup_norm(seqs.r, lambda, K);
  const double xperp_norm = weighted_sup_norm(seqs.xperp, lambda, K);
  const double dxz_norm = weighted_sup_norm(seqs.dxz, lambda, K);
  const double dy_norm = weighted_sup_norm(seqs.dy, lambda, K);
  const double zperp_norm = weighted_sup_norm(seqs.zperp, lambda, K);

  std::array<ArrowSlack, 5> arrows;
  const std::array<double, 5> lhs{xperp_norm, dxz_norm, dy_norm, zperp_norm, r_norm};
  const std::array<double, 5> source{r_norm, xperp_norm, dxz_norm, dy_norm, zperp_norm};
  const std::array<double, 5> omegas{0.0, omega2, 0.0, omega4, omega5};
  const std::array<const char*, 6> names{"r", "xperp", "dxz", "dy", "zperp", "r"};
  for (int i = 0; i < 5; ++i) {
    ArrowSlack& arrow = arrows[static_cast<std::size_t>(i)];
    arrow.arrow = i + 1;
    arrow.source = names[static_cast<std::size_t>(i)];
    arrow.target = names[static_cast<std::size_t>(i) + 1];
    arrow.gain = cert.gains[static_cast<std::size_t>(i)];
    arrow.omega = omegas[static_cast<std::size_t>(i)];
    arrow.lhs = lhs[static_cast<std::size_t>(i)];
    arrow.rhs = arrow.gain * source[static_cast<std::size_t>(i)] + arrow.omega;
    arrow.slack = arrow.rhs - arrow.lhs;
  }
  return arrows;
}

std::array<ArrowSlack, 5> arrow_slacks(const Trace& trace, const OptimalPair& opt,
                                       const RateCertificate& cert, std::size_t K) {
  return arrow_slacks(derived_sequences(trace, opt), cert, K);
}

double small_gain_bound(const std::array<double, 5>& gains, const std::array<double, 5>& omegas) {
  const double product = gains[0] * gains[1] * gains[2] * gains[3] * gains[4];
  if (!(product < 1.0)) throw std::invalid_argument("gain product must be below one");
  double total = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    double tail = omegas[i];
    for (std::size_t j = i + 1; j < 5; ++j) tail *= gains[j];
    total += tail;
  }
  return total / (1.0 - product);
}

}  // namespace panda
