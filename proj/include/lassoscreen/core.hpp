#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lassoscreen {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace detail

/// A Lasso instance: minimize over x
///   0.5 * ||y - A x||_2^2 + lambda * ||x||_1
/// with dictionary A (m observations, n atoms), observation y and lambda > 0.
struct LassoProblem {
  Matrix A;
  Vector y;
  double lambda = 0.0;

  LassoProblem(Matrix A_, Vector y_, double lambda_)
      : A(std::move(A_)), y(std::move(y_)), lambda(lambda_) {
    detail::require(A.rows() >= 1 && A.cols() >= 1,
                    "LassoProblem: dictionary must have at least one row and one column");
    detail::require(y.size() == A.rows(),
                    "LassoProblem: observation length must match dictionary rows");
    detail::require(std::isfinite(lambda) && lambda > 0.0,
                    "LassoProblem: lambda must be positive and finite");
  }

  Index m() const { return A.rows(); }
  Index n() const { return A.cols(); }
};

/// Primal objective 0.5 * ||y - A x||^2 + lambda * ||x||_1.
inline double primal_objective(const LassoProblem& p, const Vector& x) {
  detail::require(x.size() == p.n(), "primal_objective: coefficient length must equal atom count");
  const Vector residual = p.y - p.A * x;
  return 0.5 * residual.squaredNorm() + p.lambda * x.lpNorm<1>();
}

/// Dual objective 0.5 * ||y||^2 - 0.5 * ||y - u||^2, defined for any u;
/// it lower-bounds the primal optimum when u is dual feasible.
inline double dual_objective(const LassoProblem& p, const Vector& u) {
  detail::require(u.size() == p.m(), "dual_objective: dual point length must equal row count");
  return 0.5 * p.y.squaredNorm() - 0.5 * (p.y - u).squaredNorm();
}

/// Whether ||A^T u||_inf <= lambda * (1 + tol), i.e. u lies in the dual
/// feasible set up to a small relative slack.
inline bool is_dual_feasible(const LassoProblem& p, const Vector& u, double tol = 1e-12) {
  detail::require(u.size() == p.m(), "is_dual_feasible: dual point length must equal row count");
  detail::require(std::isfinite(tol) && tol >= 0.0, "is_dual_feasible: tol must be nonnegative");
  return (p.A.transpose() * u).lpNorm<Eigen::Infinity>() <= p.lambda * (1.0 + tol);
}

/// Duality gap primal_objective(x) - dual_objective(u); requires u feasible
/// (up to the default slack) so that the gap is a valid optimality certificate.
inline double duality_gap(const LassoProblem& p, const Vector& x, const Vector& u) {
  detail::require(x.size() == p.n(), "duality_gap: coefficient length must equal atom count");
  if (!is_dual_feasible(p, u))
    throw std::invalid_argument("duality_gap: dual point is not feasible");
  return primal_objective(p, x) - dual_objective(p, u);
}

/// Smallest lambda for which the all-zero vector solves the problem:
/// lambda_max = ||A^T y||_inf.
inline double lambda_max(const LassoProblem& p) {
  return (p.A.transpose() * p.y).lpNorm<Eigen::Infinity>();
}

/// Map a primal point to a feasible dual point by scaling its residual:
///   u = (y - A x) / max(1, ||A^T (y - A x)||_inf / lambda).
/// The result is always feasible, and equals the residual itself whenever the
/// residual already lies in the dual feasible set.
inline Vector dual_scaling(const LassoProblem& p, const Vector& x) {
  detail::require(x.size() == p.n(), "dual_scaling: coefficient length must equal atom count");
  const Vector rho = p.y - p.A * x;
  const double scale =
      std::max(1.0, (p.A.transpose() * rho).lpNorm<Eigen::Infinity>() / p.lambda);
  return rho / scale;
}

/// Elementwise soft threshold: shrink each entry toward zero by t, clipping
/// to zero inside [-t, t]. Requires t >= 0.
inline Vector soft_threshold(const Vector& v, double t) {
  detail::require(std::isfinite(t) && t >= 0.0, "soft_threshold: threshold must be nonnegative");
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double vi = v[i];
    out[i] = vi > t ? vi - t : (vi < -t ? vi + t : 0.0);
  }
  return out;
}

}  // namespace lassoscreen
