#include "panda/objectives.hpp"

#include <stdexcept>

namespace panda {

QuadraticLocalObjective::QuadraticLocalObjective(Eigen::MatrixXd measurement, Eigen::VectorXd offset,
                                                 double ridge, double scale)
    : measurement_(std::move(measurement)),
      offset_(std::move(offset)),
      ridge_(ridge),
      scale_(scale) {
  if (measurement_.size() > 0 && measurement_.rows() != offset_.rows()) {
    throw std::invalid_argument("measurement matrix and offset sizes disagree");
  }
  if (ridge_ < 0.0) throw std::invalid_argument("ridge weight must be nonnegative");

  const Eigen::Index p = measurement_.size() > 0 ? measurement_.cols() : offset_.size();
  curvature_ = ridge_ * Eigen::MatrixXd::Identity(p, p);
  linear_ = Eigen::VectorXd::Zero(p);
  if (measurement_.size() > 0) {
    curvature_ += scale_ * measurement_.transpose() * measurement_;
    linear_ = scale_ * measurement_.transpose() * offset_;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(curvature_);
  curvature_min_ = eigen.eigenvalues().minCoeff();
  curvature_max_ = eigen.eigenvalues().maxCoeff();
  solver_.compute(curvature_);
  if (curvature_min_ <= 0.0 || solver_.info() != Eigen::Success) {
    throw std::invalid_argument("objective not strongly convex");
  }
}

Eigen::VectorXd QuadraticLocalObjective::conjugate_argmin(const Eigen::VectorXd& y) const {
  return solver_.solve(y + linear_);
}

Eigen::VectorXd QuadraticLocalObjective::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = ridge_ * x;
  if (measurement_.size() > 0) {
    g += scale_ * measurement_.transpose() * (measurement_ * x - offset_);
  }
  return g;
}

double QuadraticLocalObjective::value(const Eigen::VectorXd& x) const {
  double v = 0.5 * ridge_ * x.squaredNorm();
  if (measurement_.size() > 0) {
    v += 0.5 * scale_ * (measurement_ * x - offset_).squaredNorm();
  }
  return v;
}

ProblemConstants constants(std::span<const QuadraticLocalObjective> objectives) {
  if (objectives.empty()) throw std::invalid_argument("constants need at least one objective");
  ProblemConstants out;
  out.mu = objectives.front().curvature_min();
  out.L = objectives.front().curvature_max();
  for (const auto& obj : objectives) {
    out.mu = std::min(out.mu, obj.curvature_min());
    out.L = std::max(out.L, obj.curvature_max());
  }
  if (out.mu <= 0.0) throw std::invalid_argument("objective not strongly convex");
  out.kappa = out.L / out.mu;
  return out;
}

Eigen::VectorXd centralized_optimum(std::span<const QuadraticLocalObjective> objectives) {
  if (objectives.empty()) throw std::invalid_argument("optimum needs at least one objective");
  const int p = objectives.front().dim();
  Eigen::MatrixXd total_curvature = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd total_linear = Eigen::VectorXd::Zero(p);
  for (const auto& obj : objectives) {
    if (obj.dim() != p) throw std::invalid_argument("objectives disagree on dimension");
    total_curvature += obj.curvature();
    if (obj.measurement().size() > 0) {
      total_linear += obj.scale() * obj.measurement().transpose() * obj.offset();
    }
  }
  Eigen::LLT<Eigen::MatrixXd> solver(total_curvature);
  if (solver.info() != Eigen::Success) throw std::invalid_argument("aggregate curvature is singular");
  return solver.solve(total_linear);
}

Eigen::MatrixXd dual_optimum(std::span<const QuadraticLocalObjective> objectives,
                             const Eigen::VectorXd& x_star) {
  Eigen::MatrixXd y(x_star.size(), static_cast<Eigen::Index>(objectives.size()));
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    y.col(static_cast<Eigen::Index>(i)) = objectives[i].gradient(x_star);
  }
  return y;
}

OptimalPair optimal_pair(std::span<const QuadraticLocalObjective> objectives) {
  OptimalPair pair;
  pair.x_star = centralized_optimum(objectives);
  pair.y_star = dual_optimum(objectives, pair.x_star);
  return pair;
}

}  // namespace panda
