#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "panda/graph_dynamics.hpp"
#include "panda/objectives.hpp"

namespace panda {

enum class AlgorithmId { panda, diging, dual_decomp };

std::string to_string(AlgorithmId id);
AlgorithmId algorithm_from_string(const std::string& name);

// Per-node vectors are stored one column per node (p x n). Unused trackers
// stay empty: z belongs to the dual-ascent tracker, g to gradient tracking.
struct AlgorithmState {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
  Eigen::MatrixXd z;
  Eigen::MatrixXd g;
  std::int64_t k = 0;
};

struct TraceMetadata {
  std::string algorithm;
  double step = 0.0;
  std::int64_t iterations = 0;
  std::string rng;
  std::string schedule;
  std::string instance;
};

struct Trace {
  std::vector<AlgorithmState> states;
  TraceMetadata meta;

  const AlgorithmState& at(std::int64_t k) const { return states.at(static_cast<std::size_t>(k)); }
  std::int64_t length() const { return static_cast<std::int64_t>(states.size()); }
};

namespace detail {

inline void require_doubly_stochastic(const Eigen::MatrixXd& w) {
  constexpr double tol = 1e-10;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    if (std::abs(w.row(i).sum() - 1.0) > tol || std::abs(w.col(i).sum() - 1.0) > tol) {
      throw std::invalid_argument("invalid mixing matrix");
    }
  }
}

template <LocalObjectiveLike Obj>
Eigen::MatrixXd argmin_columns(std::span<const Obj> objectives, const Eigen::MatrixXd& y) {
  Eigen::MatrixXd x(y.rows(), y.cols());
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    x.col(i) = objectives[static_cast<std::size_t>(i)].conjugate_argmin(y.col(i));
  }
  return x;
}

template <LocalObjectiveLike Obj>
Eigen::MatrixXd gradient_columns(std::span<const Obj> objectives, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    g.col(i) = objectives[static_cast<std::size_t>(i)].gradient(x.col(i));
  }
  return g;
}

}  // namespace detail

// One dual-ascent step with primal-average tracking. Only z is communicated:
//   x <- argmin_i f_i(x_i) - y_i^T x_i
//   z <- (W (x) I) z + x_new - x_old
//   y <- y - c (x_new - z_new)
template <LocalObjectiveLike Obj>
AlgorithmState panda_step(const AlgorithmState& state, std::span<const Obj> objectives,
                          const MixingMatrix& mixing, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("step size must be positive");
  detail::require_doubly_stochastic(mixing.entries);

  AlgorithmState next;
  next.k = state.k + 1;
  next.x = detail::argmin_columns(objectives, state.y);
  next.z = state.z * mixing.entries.transpose() + next.x - state.x;
  next.y = state.y - c * (next.x - next.z);
  return next;
}

// One gradient-tracking step:
//   x <- (W (x) I) x - alpha g
//   g <- (W (x) I) g + grad f(x_new) - grad f(x_old)
template <LocalObjectiveLike Obj>
AlgorithmState diging_step(const AlgorithmState& state, std::span<const Obj> objectives,
                           const MixingMatrix& mixing, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("step size must be positive");
  detail::require_doubly_stochastic(mixing.entries);

  AlgorithmState next;
  next.k = state.k + 1;
  next.x = state.x * mixing.entries.transpose() - alpha * state.g;
  next.g = state.g * mixing.entries.transpose() + detail::gradient_columns(objectives, next.x) -
           detail::gradient_columns(objectives, state.x);
  return next;
}

// One dual-decomposition step with graph-dependent weights:
//   x <- argmin_i f_i(x_i) - y_i^T x_i
//   y <- y - c (L (x) I) x_new
template <LocalObjectiveLike Obj>
AlgorithmState dual_decomposition_step(const AlgorithmState& state, std::span<const Obj> objectives,
                                       const Eigen::MatrixXd& lap, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("step size must be positive");

  AlgorithmState next;
  next.k = state.k + 1;
  next.x = detail::argmin_columns(objectives, state.y);
  next.y = state.y - c * next.x * lap.transpose();
  return next;
}

// Runs an algorithm over the schedule, recording every state. The mixing
// input at iteration k is the Metropolis matrix of E(k) for panda/diging and
// the Laplacian for dual decomposition. Default initialization is all-zero
// (with g(0) = grad f(x(0)) for diging); pass `initial` to override, e.g.
// for fixed-point checks.
Trace run(AlgorithmId algorithm, std::span<const QuadraticLocalObjective> objectives,
          const GraphSchedule& schedule, double step, std::int64_t iterations,
          const std::optional<AlgorithmState>& initial = std::nullopt);

}  // namespace panda
