#pragma once

#include "mqhelm/kernel.hpp"
#include "mqhelm/point_set.hpp"
#include "mqhelm/types.hpp"

#include <span>

namespace mqhelm {

// Robin boundary operator a(X) u + b(X) du/dn = g(X); Dirichlet is the
// special case b == 0.
struct BoundarySpec {
  enum class Mode { Dirichlet, Robin };

  Mode mode = Mode::Dirichlet;
  ScalarField a;
  ScalarField b;

  static BoundarySpec dirichlet() {
    BoundarySpec bc;
    bc.mode = Mode::Dirichlet;
    bc.a = [](const Vec3&) { return 1.0; };
    bc.b = [](const Vec3&) { return 0.0; };
    return bc;
  }
  static BoundarySpec robin(ScalarField a, ScalarField b) {
    BoundarySpec bc;
    bc.mode = Mode::Robin;
    bc.a = std::move(a);
    bc.b = std::move(b);
    return bc;
  }
};

// One Helmholtz problem instance: Delta u + k^2 u = f in the domain,
// boundary operator applied on the boundary samples.
struct ProblemSpec {
  double wavenumber;
  KernelParams kernel;
  BoundarySpec bc;
  ScalarField source;         // f
  ScalarField boundary_data;  // g
};

// Dense Kansa system A alpha = rhs with interior (Helmholtz) rows first and
// boundary-operator rows after; columns indexed by all N centers in the
// PointSet order (interior then boundary).
struct CollocationSystem {
  Matrix A;
  Vector rhs;
  Eigen::Index row_split;  // rows [0, row_split) are interior rows
  PointSet centers;
  ProblemSpec spec;
};

CollocationSystem assemble(const PointSet& points, const ProblemSpec& spec);

// Interpolation matrix B_ij = phi(||X_i - X_j||) bordered by a ones
// column/row with a zero corner; nonsingular for pairwise-distinct points.
Matrix assemble_augmented_interpolation(std::span<const Vec3> points,
                                        const KernelParams& p);
Matrix assemble_augmented_interpolation(const PointSet& points,
                                        const KernelParams& p);

// sigma_1 / sigma_r with r the numerical rank at threshold
// sigma_1 * N * machine epsilon.
double condition_number(const Matrix& A);

// Debug text dump: "matrix v1: N M" then row-major entries.
void write_matrix(const Matrix& A, const std::string& path);

}  // namespace mqhelm
