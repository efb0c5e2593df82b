#pragma once

#include "mqhelm/types.hpp"

#include <optional>

namespace mqhelm {

// Matrix accessed only through products with itself and its transpose; the
// bidiagonalization never forms or inspects entries.
struct LinearOperator {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::function<Vector(const Vector&)> apply;            // x -> A x
  std::function<Vector(const Vector&)> apply_transpose;  // x -> A^T x

  // Wraps a dense matrix; the matrix must outlive the operator.
  static LinearOperator dense(const Matrix& a);
};

enum class Reorth { None, Full };

// Result of ell steps of Golub-Kahan bidiagonalization started from f:
//   A Z = W C,   A^T W = Z C^T,   w_1 = f / ||f||_2.
// C is (s+1) x s lower bidiagonal with diagonal alpha_1..alpha_s and
// subdiagonal beta_2..beta_{s+1}, where s = steps_completed. W holds s+1
// columns, except when the recurrence broke down while forming w_{s+1}
// (beta breakdown), in which case W has s columns and the last row of C is
// the near-zero beta that triggered the stop.
struct GkbFactorization {
  Matrix W;
  Matrix Z;
  Matrix C;
  double beta1 = 0.0;  // ||f||_2
  Eigen::Index steps_completed = 0;
  std::optional<Eigen::Index> breakdown_step;  // 1-based step index
};

GkbFactorization gkb(const LinearOperator& op, const Vector& f,
                     Eigen::Index ell, Reorth reorth = Reorth::Full);
GkbFactorization gkb(const Matrix& a, const Vector& f, Eigen::Index ell,
                     Reorth reorth = Reorth::Full);

}  // namespace mqhelm
