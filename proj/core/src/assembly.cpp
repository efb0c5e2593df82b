#include "mqhelm/assembly.hpp"

#include "mqhelm/regularize.hpp"

#include <fstream>

namespace mqhelm {

CollocationSystem assemble(const PointSet& points, const ProblemSpec& spec) {
  const Eigen::Index n = points.total_count();
  const Eigen::Index ni = points.interior_count();

  Matrix A(n, n);
  Vector rhs(n);

  for (Eigen::Index i = 0; i < ni; ++i) {
    const Vec3& x = points.interior()[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j)
      A(i, j) =
          mq_helmholtz((x - points.node(j)).norm(), spec.kernel,
                       spec.wavenumber);
    rhs(i) = spec.source(x);
  }
  for (Eigen::Index bi = 0; bi < points.boundary_count(); ++bi) {
    const auto& bp = points.boundary()[static_cast<std::size_t>(bi)];
    const Eigen::Index i = ni + bi;
    const double a = spec.bc.a(bp.position);
    const double b = spec.bc.mode == BoundarySpec::Mode::Dirichlet
                         ? 0.0
                         : spec.bc.b(bp.position);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Vec3& c = points.node(j);
      double entry = a * mq_value((bp.position - c).norm(), spec.kernel);
      if (b != 0.0)
        entry += b * mq_normal_derivative(bp.position, c, bp.normal,
                                          spec.kernel);
      A(i, j) = entry;
    }
    rhs(i) = spec.boundary_data(bp.position);
  }
  return CollocationSystem{std::move(A), std::move(rhs), ni, points, spec};
}

Matrix assemble_augmented_interpolation(std::span<const Vec3> points,
                                        const KernelParams& p) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Matrix B(n + 1, n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    B(i, i) = 1.0;  // phi(0)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = mq_value(
          (points[static_cast<std::size_t>(i)] -
           points[static_cast<std::size_t>(j)]).norm(),
          p);
      B(i, j) = v;
      B(j, i) = v;
    }
  }
  B.row(n).setOnes();
  B.col(n).setOnes();
  B(n, n) = 0.0;
  return B;
}

Matrix assemble_augmented_interpolation(const PointSet& points,
                                        const KernelParams& p) {
  std::vector<Vec3> all;
  all.reserve(static_cast<std::size_t>(points.total_count()));
  for (Eigen::Index i = 0; i < points.total_count(); ++i)
    all.push_back(points.node(i));
  return assemble_augmented_interpolation(std::span<const Vec3>(all), p);
}

double condition_number(const Matrix& A) {
  if (A.size() == 0 || A.isZero(0.0))
    throw std::invalid_argument("condition_number: zero matrix");
  const SvdFactors s = svd(A);
  return s.sigma(0) / s.sigma(s.sigma.size() - 1);
}

void write_matrix(const Matrix& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  out << "matrix v1: " << A.rows() << " " << A.cols() << "\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      out << A(i, j);
      out << (j + 1 == A.cols() ? '\n' : ' ');
    }
  }
  if (!out) throw ParseError("write failed: " + path);
}

}  // namespace mqhelm
