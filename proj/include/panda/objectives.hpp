#pragma once

#include <Eigen/Dense>

#include <concepts>
#include <span>
#include <vector>

namespace panda {

// Contract every pluggable per-node objective must satisfy: a conjugate
// argmin oracle, a gradient, and curvature bounds.
template <class T>
concept LocalObjectiveLike = requires(const T obj, const Eigen::VectorXd& v) {
  { obj.conjugate_argmin(v) } -> std::convertible_to<Eigen::VectorXd>;
  { obj.gradient(v) } -> std::convertible_to<Eigen::VectorXd>;
  { obj.curvature_min() } -> std::convertible_to<double>;
  { obj.curvature_max() } -> std::convertible_to<double>;
  { obj.dim() } -> std::convertible_to<int>;
};

// Ridge term f(x) = (scale/2) ||H x - b||^2 + (ridge/2) ||x||^2 with
// curvature matrix Q = scale H^T H + ridge I. Q must be positive definite;
// its factorization is computed once and reused for every argmin solve.
class QuadraticLocalObjective {
 public:
  QuadraticLocalObjective(Eigen::MatrixXd measurement, Eigen::VectorXd offset, double ridge,
                          double scale);

  // Solves grad f(x) = y, i.e. the argmin of f(x) - y^T x.
  Eigen::VectorXd conjugate_argmin(const Eigen::VectorXd& y) const;

  // scale * H^T (H x - b) + ridge * x.
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;

  double value(const Eigen::VectorXd& x) const;

  double curvature_min() const { return curvature_min_; }
  double curvature_max() const { return curvature_max_; }
  const Eigen::MatrixXd& curvature() const { return curvature_; }
  const Eigen::MatrixXd& measurement() const { return measurement_; }
  const Eigen::VectorXd& offset() const { return offset_; }
  double ridge() const { return ridge_; }
  double scale() const { return scale_; }
  int dim() const { return static_cast<int>(curvature_.rows()); }

 private:
  Eigen::MatrixXd measurement_;
  Eigen::VectorXd offset_;
  double ridge_ = 0.0;
  double scale_ = 1.0;
  Eigen::MatrixXd curvature_;
  Eigen::VectorXd linear_;  // scale * H^T b
  Eigen::LLT<Eigen::MatrixXd> solver_;
  double curvature_min_ = 0.0;
  double curvature_max_ = 0.0;
};

static_assert(LocalObjectiveLike<QuadraticLocalObjective>);

struct ProblemConstants {
  double mu = 0.0;
  double L = 0.0;
  double kappa = 1.0;
};

// mu = min_i lambda_min(Q_i), L = max_i lambda_max(Q_i): the extreme
// curvatures of the block-diagonal Hessian of sum_i f_i(x_i).
ProblemConstants constants(std::span<const QuadraticLocalObjective> objectives);

// Exact minimizer of sum_i f_i(x) over a single shared variable.
Eigen::VectorXd centralized_optimum(std::span<const QuadraticLocalObjective> objectives);

// Per-node dual optimum y*_i = grad f_i(x_star), stored one column per node.
Eigen::MatrixXd dual_optimum(std::span<const QuadraticLocalObjective> objectives,
                             const Eigen::VectorXd& x_star);

struct OptimalPair {
  Eigen::VectorXd x_star;  // consensus minimizer, length p
  Eigen::MatrixXd y_star;  // p x n, column i = grad f_i(x_star)
};

OptimalPair optimal_pair(std::span<const QuadraticLocalObjective> objectives);

}  // namespace panda
