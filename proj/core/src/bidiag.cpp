#include "mqhelm/bidiag.hpp"

#include <cmath>
#include <limits>

namespace mqhelm {

LinearOperator LinearOperator::dense(const Matrix& a) {
  LinearOperator op;
  op.rows = a.rows();
  op.cols = a.cols();
  op.apply = [&a](const Vector& x) -> Vector { return a * x; };
  op.apply_transpose = [&a](const Vector& x) -> Vector {
    return a.transpose() * x;
  };
  return op;
}

GkbFactorization gkb(const LinearOperator& op, const Vector& f,
                     Eigen::Index ell, Reorth reorth) {
  const Eigen::Index n = op.rows;
  if (f.size() != n)
    throw std::invalid_argument("gkb: f length does not match operator");
  if (ell < 1 || ell > op.cols)
    throw std::invalid_argument("gkb: ell out of range");
  const double beta1 = f.norm();
  if (beta1 == 0.0) throw std::invalid_argument("gkb: f must be nonzero");

  Matrix W(n, ell + 1);
  Matrix Z(n, ell);
  Vector alphas(ell), betas(ell);
  W.col(0) = f / beta1;

  // Near-breakdown threshold, scaled by a running Frobenius-norm estimate
  // accumulated from the bidiagonal entries themselves so the operator is
  // only ever touched through matvecs.
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double fro2 = 0.0;

  Eigen::Index steps = 0;
  std::optional<Eigen::Index> breakdown;
  double beta_prev = 0.0;
  for (Eigen::Index j = 0; j < ell; ++j) {
    Vector r = op.apply_transpose(W.col(j));
    if (j > 0) r -= beta_prev * Z.col(j - 1);
    if (reorth == Reorth::Full && j > 0)
      for (Eigen::Index i = 0; i < j; ++i)
        r -= Z.col(i).dot(r) * Z.col(i);
    const double alpha = r.norm();
    if (!std::isfinite(alpha))
      throw std::runtime_error("gkb: non-finite recurrence (bad operator "
                               "or right-hand side)");
    fro2 += alpha * alpha;
    double tol = 100.0 * eps * std::sqrt(fro2);
    if (alpha <= tol) {
      breakdown = j + 1;
      break;
    }
    Z.col(j) = r / alpha;
    alphas(j) = alpha;

    Vector p = op.apply(Z.col(j)) - alpha * W.col(j);
    if (reorth == Reorth::Full)
      for (Eigen::Index i = 0; i <= j; ++i)
        p -= W.col(i).dot(p) * W.col(i);
    const double beta = p.norm();
    if (!std::isfinite(beta))
      throw std::runtime_error("gkb: non-finite recurrence (bad operator "
                               "or right-hand side)");
    fro2 += beta * beta;
    tol = 100.0 * eps * std::sqrt(fro2);
    betas(j) = beta;
    steps = j + 1;
    if (beta <= tol) {
      breakdown = j + 1;
      break;
    }
    W.col(j + 1) = p / beta;
    beta_prev = beta;
  }

  GkbFactorization out;
  out.beta1 = beta1;
  out.steps_completed = steps;
  out.breakdown_step = breakdown;
  out.Z = Z.leftCols(steps);
  out.C = Matrix::Zero(steps + 1, steps);
  for (Eigen::Index j = 0; j < steps; ++j) {
    out.C(j, j) = alphas(j);
    out.C(j + 1, j) = betas(j);
  }
  // Beta breakdown leaves w_{s+1} unformed.
  const bool beta_breakdown = breakdown && *breakdown == steps;
  out.W = W.leftCols(beta_breakdown ? steps : steps + 1);
  return out;
}

GkbFactorization gkb(const Matrix& a, const Vector& f, Eigen::Index ell,
                     Reorth reorth) {
  return gkb(LinearOperator::dense(a), f, ell, reorth);
}

}  // namespace mqhelm
