#include "mqhelm/selfcheck.hpp"

#include "mqhelm/assembly.hpp"
#include "mqhelm/bidiag.hpp"
#include "mqhelm/evaluate.hpp"
#include "mqhelm/point_set.hpp"
#include "mqhelm/regularize.hpp"
#include "mqhelm/rng.hpp"

#include <cmath>
#include <sstream>

namespace mqhelm::selfcheck {

namespace {

Matrix random_matrix(Eigen::Index n, Rng& rng) {
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  return a;
}

Vector random_vector(Eigen::Index n, Rng& rng) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

Matrix random_orthogonal(Eigen::Index n, Rng& rng) {
  return Eigen::HouseholderQR<Matrix>(random_matrix(n, rng)).householderQ();
}

// Gaussian-filled matrix with prescribed condition number.
Matrix random_conditioned(Eigen::Index n, double condition, Rng& rng) {
  const Matrix u = random_orthogonal(n, rng);
  const Matrix v = random_orthogonal(n, rng);
  Vector s(n);
  for (Eigen::Index i = 0; i < n; ++i)
    s(i) = std::pow(condition, -static_cast<double>(i) /
                                   static_cast<double>(n - 1));
  return u * s.asDiagonal() * v.transpose();
}

double fd_laplacian(const std::function<double(const Vec3&)>& u,
                    const Vec3& p, double h) {
  double acc = -6.0 * u(p);
  for (int c = 0; c < 3; ++c) {
    Vec3 e = Vec3::Zero();
    e[c] = h;
    acc += u(p + e) + u(p - e);
  }
  return acc / (h * h);
}

std::string describe(double worst, double tol) {
  std::ostringstream os;
  os << "max deviation " << worst << " (tol " << tol << ")";
  return os.str();
}

CheckResult check_scale_identity() {
  CheckResult res{"kernel_scale_identity", true, ""};
  double worst = 0.0;
  for (double eps : {0.25, 0.5, 1.0, 2.0, 4.0})
    for (double r = 0.0; r <= 5.0; r += 0.25) {
      const double lhs = mq_value(r, KernelParams(eps));
      const double rhs = mq_value(eps * r, KernelParams(1.0));
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  res.passed = worst <= 1e-15;
  res.detail = describe(worst, 1e-15);
  return res;
}

CheckResult check_complete_monotonicity() {
  CheckResult res{"mq_complete_monotonicity", true, ""};
  bool ok = true;
  const double h = 0.02;
  for (double eps : {0.25, 1.0, 4.0}) {
    const auto psi = [eps](double s) { return std::sqrt(1.0 + eps * eps * s); };
    for (double s = 0.1; s <= 10.0; s += 0.3) {
      const double d1 = (psi(s + h) - psi(s - h)) / (2.0 * h);
      const double d2 = (psi(s + h) - 2.0 * psi(s) + psi(s - h)) / (h * h);
      const double d3 = (psi(s + 2.0 * h) - 2.0 * psi(s + h) +
                         2.0 * psi(s - h) - psi(s - 2.0 * h)) /
                        (2.0 * h * h * h);
      ok = ok && d1 > 0.0 && d2 < 0.0 && d3 > 0.0;
    }
  }
  res.passed = ok;
  res.detail = ok ? "derivative signs alternate (+,-,+)"
                  : "sign pattern violated";
  return res;
}

CheckResult check_manufactured_consistency(int n_points) {
  CheckResult res{"manufactured_source_fd", true, ""};
  Rng rng(2024);
  double worst = 0.0;
  const double h = 1e-4;
  for (const auto& mc : {cube_case(3.0), sphere_case(3.0), pump_case(3.0)}) {
    const auto u = [&mc](const Vec3& x) { return exact_u(mc, x); };
    for (int i = 0; i < n_points; ++i) {
      const Vec3 p{rng.uniform_open(-1.0, 1.0), rng.uniform_open(-1.0, 1.0),
                   rng.uniform_open(-1.0, 1.0)};
      const double lhs = fd_laplacian(u, p, h) +
                         mc.wavenumber * mc.wavenumber * exact_u(mc, p);
      worst = std::max(worst, std::abs(lhs - manufactured_source(mc, p)));
    }
  }
  res.passed = worst <= 1e-5;
  res.detail = describe(worst, 1e-5);
  return res;
}

CheckResult check_gkb_identities(int reps, Eigen::Index n, Eigen::Index ell) {
  CheckResult res{"gkb_identities", true, ""};
  Rng rng(7);
  double worst = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const Matrix a = random_matrix(n, rng);
    const Vector f = random_vector(n, rng);
    const GkbFactorization fac = gkb(a, f, ell, Reorth::Full);
    const double scale = a.norm();
    const Eigen::Index s = fac.steps_completed;
    worst = std::max(worst, (a * fac.Z - fac.W * fac.C).norm() / scale);
    // Transpose identity on the square sub-block: column s+1 of A^T W
    // carries the next step's alpha remainder by construction.
    worst = std::max(worst,
                     (a.transpose() * fac.W.leftCols(s) -
                      fac.Z * fac.C.topRows(s).transpose())
                             .norm() /
                         scale);
    const Eigen::Index wc = fac.W.cols(), zc = fac.Z.cols();
    worst = std::max(worst, (fac.W.transpose() * fac.W -
                             Matrix::Identity(wc, wc)).norm());
    worst = std::max(worst, (fac.Z.transpose() * fac.Z -
                             Matrix::Identity(zc, zc)).norm());
    worst = std::max(worst, (fac.W.col(0) - f / f.norm()).norm());
  }
  res.passed = worst <= 1e-10;
  res.detail = describe(worst, 1e-10);
  return res;
}

// CPD of order 1 with the classical sign convention: (-1) c^T B c > 0 on
// the zero-sum subspace, hence the ones-augmented system is nonsingular.
CheckResult check_cpd1(int n_sets, int n_vectors) {
  CheckResult res{"mq_cpd1_zero_sum_form", true, ""};
  Rng rng(11);
  double worst = std::numeric_limits<double>::infinity();
  bool augmented_ok = true;
  for (int set = 0; set < n_sets; ++set) {
    std::vector<Vec3> pts;
    std::vector<BoundaryPoint> bps;
    for (int i = 0; i < 50; ++i)
      pts.emplace_back(rng.uniform_open(), rng.uniform_open(),
                       rng.uniform_open());
    bps.push_back({Vec3{0.0, 0.0, 0.0}, Vec3{0.0, 0.0, -1.0}});
    const PointSet ps(pts, bps, "cpd1");
    for (double eps : {0.5, 1.0, 2.0}) {
      const KernelParams p(eps);
      const Matrix aug = assemble_augmented_interpolation(ps, p);
      const Eigen::Index n = aug.rows() - 1;
      const Matrix b = aug.topLeftCorner(n, n);
      for (int v = 0; v < n_vectors; ++v) {
        Vector c = random_vector(n, rng);
        c.array() -= c.mean();  // zero-sum
        if (c.norm() == 0.0) continue;
        worst = std::min(worst, -c.dot(b * c));
      }
      augmented_ok = augmented_ok &&
                     Eigen::FullPivLU<Matrix>(aug).isInvertible();
    }
  }
  res.passed = worst > 0.0 && augmented_ok;
  std::ostringstream os;
  os << "min of (-1) c^T B c = " << worst << ", augmented system "
     << (augmented_ok ? "nonsingular" : "SINGULAR");
  res.detail = os.str();
  return res;
}

CheckResult check_filter_monotonicity() {
  CheckResult res{"tikhonov_filter_monotonicity", true, ""};
  Rng rng(13);
  const Matrix a = random_conditioned(30, 1e8, rng);
  const Vector f = random_vector(30, rng);
  const SvdFactors s = svd(a);
  const Vector grid = LambdaGrid{}.points(s.sigma(0));
  double prev_rho = -1.0, prev_eta = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const SolveReport rep = tikhonov_filter_solve(s, f, grid(i));
    ok = ok && rep.rho >= prev_rho - 1e-12 && rep.eta <= prev_eta + 1e-12;
    prev_rho = rep.rho;
    prev_eta = rep.eta;
  }
  res.passed = ok;
  res.detail = ok ? "rho non-decreasing, eta non-increasing over the grid"
                  : "monotonicity violated";
  return res;
}

CheckResult check_ine_tsvd_oracle(int reps, Eigen::Index n) {
  CheckResult res{"ine_tsvd_equals_tsvd", true, ""};
  Rng rng(17);
  double worst = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const Matrix a = random_matrix(n, rng);
    const Vector f = random_vector(n, rng);
    const SvdFactors s = svd(a);
    for (Eigen::Index k : {1, 5, 10, 20}) {
      if (k > n) continue;
      const SolveReport fast = ine_tsvd(a, f, n, k);
      const SolveReport oracle = tsvd_solve(s, f, k);
      worst = std::max(worst, (fast.alpha - oracle.alpha).norm() /
                                  oracle.alpha.norm());
    }
  }
  res.passed = worst <= 1e-8;
  res.detail = describe(worst, 1e-8);
  return res;
}

CheckResult check_tikhonov_normal_equations(int reps) {
  CheckResult res{"tikhonov_equals_normal_equations", true, ""};
  Rng rng(19);
  double worst = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const Matrix a = random_conditioned(30, 1e6, rng);
    const Vector f = random_vector(30, rng);
    const SvdFactors s = svd(a);
    for (double factor : {1e-3, 1.0, 10.0}) {
      const double lambda = factor * s.sigma(0);
      const SolveReport rep_svd = tikhonov_filter_solve(s, f, lambda);
      const Matrix normal =
          a.transpose() * a + lambda * lambda * Matrix::Identity(30, 30);
      const Vector oracle = normal.ldlt().solve(a.transpose() * f);
      worst =
          std::max(worst, (rep_svd.alpha - oracle).norm() / oracle.norm());
    }
  }
  res.passed = worst <= 1e-8;
  res.detail = describe(worst, 1e-8);
  return res;
}

CheckResult check_gcv_hat_matrix(int reps) {
  CheckResult res{"gcv_equals_hat_matrix", true, ""};
  Rng rng(23);
  double worst = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const Eigen::Index n = 8;
    // Bounded conditioning: below ~1e-2 sigma1 the dense hat-matrix oracle
    // itself cancels catastrophically in (I - H) f.
    const Matrix a = random_conditioned(n, 1e2, rng);
    const Vector f = random_vector(n, rng);
    const SvdFactors s = svd(a);
    for (int i = 0; i < 20; ++i) {
      const double lambda =
          s.sigma(0) * std::pow(10.0, -2.0 + 3.0 * i / 19.0);
      const auto fast = gcv_value(s, f, lambda, n);
      if (!fast) continue;
      const Matrix hat =
          a *
          (a.transpose() * a + lambda * lambda * Matrix::Identity(n, n))
              .ldlt()
              .solve(a.transpose());
      const double num = ((Matrix::Identity(n, n) - hat) * f).squaredNorm();
      const double den = static_cast<double>(n) - hat.trace();
      const double oracle = num / (den * den);
      worst = std::max(worst, std::abs(*fast - oracle) / oracle);
    }
  }
  res.passed = worst <= 1e-10;
  res.detail = describe(worst, 1e-10);
  return res;
}

CheckResult check_hkt_full_projection(Eigen::Index n) {
  CheckResult res{"hkt_full_projection_limit", true, ""};
  Rng rng(29);
  const Matrix a = random_matrix(n, rng);
  const Vector f = random_vector(n, rng);
  const SolveReport hybrid = hkt_solve(a, f, n);
  const SvdFactors s = svd(a);
  const SolveReport full = tikhonov_filter_solve(s, f, hybrid.param);
  const double diff = (hybrid.alpha - full.alpha).norm() / full.alpha.norm();
  res.passed = diff <= 1e-8;
  res.detail = describe(diff, 1e-8);
  return res;
}

CheckResult check_reg_gmres_full_space(Eigen::Index n) {
  CheckResult res{"reg_gmres_full_krylov", true, ""};
  Rng rng(31);
  // SPD with modest spread plus faint noise so GCV settles in the
  // negligible-filtering regime.
  const Matrix q = random_orthogonal(n, rng);
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i)
    d(i) = 1.0 + static_cast<double>(i) / static_cast<double>(n - 1);
  const Matrix a = q * d.asDiagonal() * q.transpose();
  Vector f = random_vector(n, rng);
  Vector noise = random_vector(n, rng);
  f += 1e-11 * f.norm() / noise.norm() * noise;
  const SolveReport rep = reg_gmres(a, f, n);
  const Vector oracle = a.ldlt().solve(f);
  const double diff = (rep.alpha - oracle).norm() / oracle.norm();
  res.passed = diff <= 1e-8;
  res.detail = describe(diff, 1e-8);
  return res;
}

}  // namespace

CheckResult check_kernel_laplacian_fd(
    int n_points,
    const std::function<double(double, const KernelParams&)>& laplacian) {
  const auto lap = laplacian
                       ? laplacian
                       : [](double r, const KernelParams& p) {
                           return mq_laplacian3d(r, p);
                         };
  CheckResult res{"kernel_laplacian_fd", true, ""};
  Rng rng(42);
  double worst = 0.0;
  const double h = 1e-4;
  for (int i = 0; i < n_points; ++i) {
    const double eps = rng.uniform_open(0.25, 4.0);
    const KernelParams p(eps);
    const Vec3 x{rng.uniform_open(-2.0, 2.0), rng.uniform_open(-2.0, 2.0),
                 rng.uniform_open(-2.0, 2.0)};
    const auto u = [&p](const Vec3& y) { return mq_value(y.norm(), p); };
    const double oracle = fd_laplacian(u, x, h);
    worst = std::max(worst, std::abs(oracle - lap(x.norm(), p)));
  }
  res.passed = worst <= 1e-5;
  res.detail = describe(worst, 1e-5);
  return res;
}

ValidationReport run_selfchecks(bool full) {
  ValidationReport report;
  report.checks.push_back(check_kernel_laplacian_fd(full ? 100 : 25));
  report.checks.push_back(check_scale_identity());
  report.checks.push_back(check_complete_monotonicity());
  report.checks.push_back(check_manufactured_consistency(full ? 50 : 15));
  report.checks.push_back(
      full ? check_gkb_identities(20, 100, 30) : check_gkb_identities(3, 60, 20));
  report.checks.push_back(full ? check_cpd1(5, 200) : check_cpd1(2, 50));
  report.checks.push_back(check_filter_monotonicity());
  report.checks.push_back(check_ine_tsvd_oracle(full ? 10 : 3, 40));
  report.checks.push_back(check_tikhonov_normal_equations(full ? 10 : 3));
  report.checks.push_back(check_gcv_hat_matrix(full ? 8 : 3));
  report.checks.push_back(check_hkt_full_projection(40));
  report.checks.push_back(check_reg_gmres_full_space(30));
  return report;
}

}  // namespace mqhelm::selfcheck
