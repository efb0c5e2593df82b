// Acceptance suite: end-to-end and oracle-equivalence gates, one PASS/FAIL
// line per criterion. Exits nonzero if any criterion fails.

#include "mqhelm/assembly.hpp"
#include "mqhelm/bidiag.hpp"
#include "mqhelm/evaluate.hpp"
#include "mqhelm/experiment.hpp"
#include "mqhelm/point_set.hpp"
#include "mqhelm/regularize.hpp"
#include "mqhelm/rng.hpp"

#include "support/oracles.hpp"

#include <Eigen/LU>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace mqhelm;

namespace {

struct Criterion {
  std::string name;
  bool passed = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// --- 1. GKB factorization identities ---------------------------------------
Criterion gkb_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  oracles::Rng rng(101);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = oracles::random_matrix(100, 100, rng);
    const Vector f = oracles::random_vector(100, rng);
    const GkbFactorization fac = gkb(a, f, 30, Reorth::Full);
    const Eigen::Index s = fac.steps_completed;
    const double scale = a.norm();
    worst = std::max(worst, (a * fac.Z - fac.W * fac.C).norm() / scale);
    worst = std::max(worst, (a.transpose() * fac.W.leftCols(s) -
                             fac.Z * fac.C.topRows(s).transpose())
                                    .norm() /
                                scale);
    worst = std::max(worst,
                     (fac.W.transpose() * fac.W -
                      Matrix::Identity(fac.W.cols(), fac.W.cols()))
                         .norm());
    worst = std::max(worst,
                     (fac.Z.transpose() * fac.Z -
                      Matrix::Identity(fac.Z.cols(), fac.Z.cols()))
                         .norm());
  }
  const double elapsed = seconds_since(t0);
  Criterion c{"gkb-identities-20x100", false, ""};
  c.passed = worst <= 1e-10 && elapsed < 5.0;
  c.detail = "max deviation " + fmt(worst) + " (tol 1e-10), " +
             fmt(elapsed) + " s (< 5 s); transpose identity on the square "
             "block, see ledger";
  return c;
}

// --- 2. Ine-TSVD equals the full-SVD TSVD oracle ----------------------------
Criterion ine_tsvd_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  oracles::Rng rng(102);
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = oracles::random_matrix(40, 40, rng);
    const Vector f = oracles::random_vector(40, rng);
    const SvdFactors s = svd(a);
    for (Eigen::Index k : {1, 5, 10, 20}) {
      const SolveReport fast = ine_tsvd(a, f, 40, k);
      const SolveReport oracle = tsvd_solve(s, f, k);
      worst = std::max(
          worst, (fast.alpha - oracle.alpha).norm() / oracle.alpha.norm());
    }
  }
  const double elapsed = seconds_since(t0);
  Criterion c{"ine-tsvd-equals-tsvd", false, ""};
  c.passed = worst <= 1e-8 && elapsed < 5.0;
  c.detail = "max relative diff " + fmt(worst) + " (tol 1e-8), " +
             fmt(elapsed) + " s (< 5 s)";
  return c;
}

// --- 3. Tikhonov filter equals the normal equations -------------------------
Criterion tikhonov_normal_equations() {
  oracles::Rng rng(103);
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::Index n = 30;
    Matrix u, v;
    const Matrix a = oracles::matrix_with_spectrum(
        oracles::geometric_spectrum(n, 1e-6), rng, &u, &v);
    const Vector f = oracles::random_vector(n, rng);
    const SvdFactors s = svd(a);
    for (double factor : {1e-3, 1.0, 10.0}) {
      const double lambda = factor * s.sigma(0);
      const SolveReport rep_svd = tikhonov_filter_solve(s, f, lambda);
      const Vector oracle =
          (a.transpose() * a + lambda * lambda * Matrix::Identity(n, n))
              .ldlt()
              .solve(a.transpose() * f);
      worst =
          std::max(worst, (rep_svd.alpha - oracle).norm() / oracle.norm());
    }
  }
  Criterion c{"tikhonov-equals-normal-eq", false, ""};
  c.passed = worst <= 1e-8;
  c.detail = "max relative diff " + fmt(worst) + " (tol 1e-8), kappa 1e6";
  return c;
}

// --- 4. GCV spectrum formula equals the explicit hat-matrix -----------------
Criterion gcv_hat_matrix() {
  oracles::Rng rng(104);
  double worst = 0.0;
  for (int rep = 0; rep < 8; ++rep) {
    const Eigen::Index n = 8;
    Matrix u, v;
    const Matrix a = oracles::matrix_with_spectrum(
        oracles::geometric_spectrum(n, 1e-2), rng, &u, &v);
    const Vector f = oracles::random_vector(n, rng);
    const SvdFactors s = svd(a);
    for (int i = 0; i < 20; ++i) {
      const double lambda =
          s.sigma(0) * std::pow(10.0, -2.0 + 3.0 * i / 19.0);
      const auto fast = gcv_value(s, f, lambda, n);
      if (!fast) continue;
      const Matrix hat =
          a * (a.transpose() * a + lambda * lambda * Matrix::Identity(n, n))
                  .ldlt()
                  .solve(a.transpose());
      const double oracle =
          ((Matrix::Identity(n, n) - hat) * f).squaredNorm() /
          std::pow(static_cast<double>(n) - hat.trace(), 2);
      worst = std::max(worst, std::abs(*fast - oracle) / oracle);
    }
  }
  Criterion c{"gcv-equals-hat-matrix", false, ""};
  c.passed = worst <= 1e-10;
  c.detail = "max relative diff " + fmt(worst) +
             " (tol 1e-10), 20 lambdas in [1e-2,10]*sigma1";
  return c;
}

// --- 5. HKT full-projection limit and quasi-optimality ----------------------
Criterion hkt_quasi_optimality() {
  oracles::Rng rng(105);
  // (a) full projection: ell = N
  const Matrix a = oracles::random_matrix(40, 40, rng);
  const Vector f = oracles::random_vector(40, rng);
  const SolveReport hybrid = hkt_solve(a, f, 40);
  const SvdFactors s = svd(a);
  const SolveReport full = tikhonov_filter_solve(s, f, hybrid.param);
  const double diff =
      (hybrid.alpha - full.alpha).norm() / full.alpha.norm();

  // (b) ell = 3k on a geometric-spectrum Picard problem
  oracles::Rng rng2(1050);
  const auto prob = oracles::picard_problem(100, 1e-12, 0.5, 1e-2, rng2);
  const Eigen::Index k = 20, ell = 3 * k;
  const SolveReport reduced = hkt_solve(prob.a, prob.f, ell);
  const SvdFactors sp = svd(prob.a);
  const GcvSelection sel =
      select_lambda_gcv(sp, prob.f, LambdaGrid{}.points(sp.sigma(0)));
  const SolveReport tikh = tikhonov_filter_solve(sp, prob.f, sel.lambda);
  const double err_hkt =
      (reduced.alpha - prob.x_exact).norm() / prob.x_exact.norm();
  const double err_tikh =
      (tikh.alpha - prob.x_exact).norm() / prob.x_exact.norm();
  const double excess = (err_hkt - err_tikh) / err_tikh;

  Criterion c{"hkt-full-limit-and-quasi-opt", false, ""};
  c.passed = diff <= 1e-8 && excess <= 0.10;
  c.detail = "full-limit diff " + fmt(diff) + " (tol 1e-8); ell=3k errors " +
             fmt(err_hkt) + " vs " + fmt(err_tikh) + ", excess " +
             fmt(100.0 * excess) + "% (<= 10%)";
  return c;
}

// --- 6. CPD(1) definiteness of the MQ kernel block --------------------------
Criterion cpd1() {
  oracles::Rng rng(106);
  double worst = std::numeric_limits<double>::infinity();
  bool augmented_ok = true;
  for (int set = 0; set < 5; ++set) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 50; ++i)
      pts.emplace_back(rng.uniform_open(), rng.uniform_open(),
                       rng.uniform_open());
    for (double eps : {0.5, 1.0, 2.0}) {
      const Matrix aug = assemble_augmented_interpolation(
          std::span<const Vec3>(pts), KernelParams(eps));
      const Matrix b = aug.topLeftCorner(50, 50);
      for (int vdx = 0; vdx < 200; ++vdx) {
        Vector cvec = oracles::random_vector(50, rng);
        cvec.array() -= cvec.mean();
        worst = std::min(worst, -cvec.dot(b * cvec));
      }
      augmented_ok =
          augmented_ok && Eigen::FullPivLU<Matrix>(aug).isInvertible();
    }
  }
  Criterion c{"mq-cpd1-definiteness", false, ""};
  c.passed = worst > 0.0 && augmented_ok;
  c.detail = "min of (-1) c^T B c = " + fmt(worst) +
             " (> 0; classical CPD(1) sign, see ledger); augmented system " +
             (augmented_ok ? "nonsingular" : "SINGULAR");
  return c;
}

// Shared end-to-end runner: assemble, solve with HKT and Reg-GMRES at the
// stated subspace size, report node-set relative errors per epsilon.
struct EndToEnd {
  double best_hkt = std::numeric_limits<double>::infinity();
  double reg_gmres_at_best = std::numeric_limits<double>::infinity();
  double best_eps = 0.0;
};

EndToEnd run_end_to_end(const PointSet& points, const ManufacturedCase& mc,
                        const std::vector<double>& eps_sweep,
                        Eigen::Index ell, bool run_gmres) {
  std::vector<Vec3> nodes;
  for (Eigen::Index i = 0; i < points.total_count(); ++i)
    nodes.push_back(points.node(i));
  std::vector<double> u_exact(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    u_exact[i] = exact_u(mc, nodes[i]);

  EndToEnd result;
  for (double eps : eps_sweep) {
    ProblemSpec spec{mc.wavenumber, KernelParams(eps),
                     BoundarySpec::dirichlet(),
                     [&mc](const Vec3& x) { return manufactured_source(mc, x); },
                     [&mc](const Vec3& x) { return exact_u(mc, x); }};
    const CollocationSystem sys = assemble(points, spec);
    const SolveReport hkt = hkt_solve(sys.A, sys.rhs, ell);
    const auto u_hkt = reconstruct(hkt.alpha, points, spec.kernel, nodes);
    const double re_hkt = relative_error(u_exact, u_hkt);
    double re_gmres = std::numeric_limits<double>::quiet_NaN();
    if (run_gmres) {
      const SolveReport gm = reg_gmres(sys.A, sys.rhs, ell);
      const auto u_gm = reconstruct(gm.alpha, points, spec.kernel, nodes);
      re_gmres = relative_error(u_exact, u_gm);
    }
    if (re_hkt < result.best_hkt) {
      result.best_hkt = re_hkt;
      result.reg_gmres_at_best = re_gmres;
      result.best_eps = eps;
    }
  }
  return result;
}

// --- 7. Cube end-to-end ------------------------------------------------------
Criterion cube_end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  const PointSet points = generate_cube(359, Distribution::random(3));
  const EndToEnd r =
      run_end_to_end(points, cube_case(3.0), {0.5, 1.0, 2.0, 4.0}, 140, true);
  const double elapsed = seconds_since(t0);
  Criterion c{"cube-end-to-end-N359", false, ""};
  c.passed = r.best_hkt <= 1e-3 && r.best_hkt <= r.reg_gmres_at_best &&
             elapsed < 60.0;
  c.detail = "best-eps " + fmt(r.best_eps) + ": Re(HKT(140)) = " +
             fmt(r.best_hkt) + " (<= 1e-3), Re(Reg-GMRES(140)) = " +
             fmt(r.reg_gmres_at_best) + " (ordering HKT <= Reg-GMRES), " +
             fmt(elapsed) + " s (< 60 s)";
  return c;
}

// --- 8. Sphere end-to-end ----------------------------------------------------
Criterion sphere_end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  const PointSet points = generate_sphere(359, Distribution::random(3));
  const EndToEnd r = run_end_to_end(points, sphere_case(3.0),
                                    {0.5, 1.0, 2.0, 4.0}, 180, false);
  const double elapsed = seconds_since(t0);
  Criterion c{"sphere-end-to-end-N359", false, ""};
  c.passed = r.best_hkt <= 1e-3 && elapsed < 60.0;
  c.detail = "best-eps " + fmt(r.best_eps) + ": Re(HKT(180)) = " +
             fmt(r.best_hkt) + " (<= 1e-3), " + fmt(elapsed) + " s (< 60 s)";
  return c;
}

// --- 9. GCV trace has an interior minimum -----------------------------------
Criterion gcv_trace_shape() {
  const PointSet points = generate_cube(359, Distribution::random(3));
  const ManufacturedCase mc = cube_case(3.0);
  ProblemSpec spec{3.0, KernelParams(0.5), BoundarySpec::dirichlet(),
                   [&mc](const Vec3& x) { return manufactured_source(mc, x); },
                   [&mc](const Vec3& x) { return exact_u(mc, x); }};
  const CollocationSystem sys = assemble(points, spec);
  oracles::Rng rng(109);
  Vector noise = oracles::random_vector(sys.rhs.size(), rng);
  const Vector f =
      sys.rhs + 1e-8 * sys.rhs.norm() / noise.norm() * noise;
  const SvdFactors s = svd(sys.A);
  const GcvSelection sel =
      select_lambda_gcv(s, f, LambdaGrid{}.points(s.sigma(0)));
  std::size_t argmin = 0;
  for (std::size_t i = 1; i < sel.trace.size(); ++i)
    if (sel.trace[i].second < sel.trace[argmin].second) argmin = i;
  Criterion c{"gcv-trace-interior-minimum", false, ""};
  c.passed = argmin > 0 && argmin + 1 < sel.trace.size();
  c.detail = "argmin at trace index " + std::to_string(argmin) + " of " +
             std::to_string(sel.trace.size()) + " (interior), lambda* = " +
             fmt(sel.lambda);
  return c;
}

// --- 10. Reg-GMRES semi-convergence -----------------------------------------
Criterion semi_convergence() {
  oracles::Rng rng(110);
  const auto prob = oracles::picard_problem(100, 1e-10, 0.5, 1e-2, rng);
  const SolveReport rep =
      reg_gmres(prob.a, prob.f, 100, LambdaGrid{}, &prob.x_exact);
  double min_err = std::numeric_limits<double>::infinity();
  for (const auto& it : rep.iteration_trace)
    min_err = std::min(min_err, it.error_norm);
  const double final_err = rep.iteration_trace.back().error_norm;
  Criterion c{"reg-gmres-semi-convergence", false, ""};
  c.passed = min_err * 2.0 < final_err;
  c.detail = "min error " + fmt(min_err) + " vs final " + fmt(final_err) +
             " (>= 2x rise after the optimum)";
  return c;
}

// --- 11. Kernel calculus vs finite differences ------------------------------
Criterion kernel_calculus() {
  oracles::Rng rng(111);
  double worst_lap = 0.0;
  for (int i = 0; i < 100; ++i) {
    const KernelParams p(rng.uniform_open(0.25, 4.0));
    const Vec3 x{rng.uniform_open(-2.0, 2.0), rng.uniform_open(-2.0, 2.0),
                 rng.uniform_open(-2.0, 2.0)};
    const auto u = [&p](const Vec3& y) { return mq_value(y.norm(), p); };
    worst_lap =
        std::max(worst_lap, std::abs(oracles::fd_laplacian(u, x, 1e-4) -
                                     mq_laplacian3d(x.norm(), p)));
  }
  double worst_src = 0.0;
  for (const auto& mc : {cube_case(3.0), sphere_case(3.0), pump_case(3.0)}) {
    const auto u = [&mc](const Vec3& x) { return exact_u(mc, x); };
    for (int i = 0; i < 50; ++i) {
      const Vec3 p{rng.uniform_open(-1.0, 1.0), rng.uniform_open(-1.0, 1.0),
                   rng.uniform_open(-1.0, 1.0)};
      const double fd = oracles::fd_laplacian(u, p, 1e-4) +
                        mc.wavenumber * mc.wavenumber * exact_u(mc, p);
      worst_src = std::max(worst_src, std::abs(fd - manufactured_source(mc, p)));
    }
  }
  Criterion c{"kernel-calculus-vs-fd", false, ""};
  c.passed = worst_lap <= 1e-5 && worst_src <= 1e-5;
  c.detail = "laplacian dev " + fmt(worst_lap) + ", source dev " +
             fmt(worst_src) + " (tol 1e-5)";
  return c;
}

// --- 12. Reproducibility of the experiment CSV -------------------------------
Criterion reproducibility() {
  namespace fs = std::filesystem;
  const char* config = R"({
    "geometry": "cube",
    "distribution": {"kind": "random", "seed": 3},
    "n_target": 125,
    "epsilon": [0.5, 1.0],
    "methods": ["tikh_rg", "ine_tsvd", "hkt", "reg_gmres"],
    "ell": 60,
    "seed": 9
  })";
  ExperimentConfig cfg = parse_config_json(config, "acceptance");
  const auto run_to = [&cfg](const std::string& dir) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    cfg.output_dir = dir;
    return run_experiment(cfg).csv_path;
  };
  const std::string csv_a =
      run_to((fs::temp_directory_path() / "mqhelm_acc_a").string());
  const std::string csv_b =
      run_to((fs::temp_directory_path() / "mqhelm_acc_b").string());

  const auto read_stripped = [](const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
      lines.push_back(line.substr(0, line.rfind(',')));
    return lines;
  };
  const auto a = read_stripped(csv_a);
  const auto b = read_stripped(csv_b);
  Criterion c{"experiment-reproducibility", false, ""};
  c.passed = !a.empty() && a == b;
  c.detail = std::to_string(a.size()) +
             " CSV lines identical modulo cpu_seconds";
  return c;
}

}  // namespace

int main() {
  std::vector<std::function<Criterion()>> criteria{
      gkb_identities,      ine_tsvd_oracle, tikhonov_normal_equations,
      gcv_hat_matrix,      hkt_quasi_optimality, cpd1,
      cube_end_to_end,     sphere_end_to_end,    gcv_trace_shape,
      semi_convergence,    kernel_calculus,      reproducibility};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Criterion c = criteria[i]();
    if (!c.passed) ++failures;
    std::printf("%s  [%2zu] %s  (%s)\n", c.passed ? "PASS" : "FAIL", i + 1,
                c.name.c_str(), c.detail.c_str());
    std::fflush(stdout);
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
