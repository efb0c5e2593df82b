#include "mqhelm/regularize.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

namespace mqhelm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

class WallTimer {
 public:
  WallTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Spectrum-side view of one least-squares problem: retained singular
// values, data coefficients in the left singular basis, the data energy
// outside the retained range, and the data dimension for the GCV trace
// denominator.
struct Spectrum {
  Vector sigma;
  Vector fhat;
  double out_energy = 0.0;
  Eigen::Index n_data = 0;
};

Spectrum full_spectrum(const SvdFactors& s, const Vector& f) {
  Spectrum sp;
  sp.sigma = s.sigma;
  sp.fhat = s.U.transpose() * f;
  sp.out_energy = std::max(0.0, f.squaredNorm() - sp.fhat.squaredNorm());
  sp.n_data = s.rows;
  return sp;
}

double rho_squared(const Spectrum& sp, double lambda) {
  double acc = sp.out_energy;
  for (Eigen::Index i = 0; i < sp.sigma.size(); ++i) {
    const double s2 = sp.sigma(i) * sp.sigma(i);
    const double one_minus_phi = lambda * lambda / (s2 + lambda * lambda);
    acc += one_minus_phi * one_minus_phi * sp.fhat(i) * sp.fhat(i);
  }
  return acc;
}

double eta_squared(const Spectrum& sp, double lambda) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sp.sigma.size(); ++i) {
    const double s2 = sp.sigma(i) * sp.sigma(i);
    const double phi_over_sigma = sp.sigma(i) / (s2 + lambda * lambda);
    acc += phi_over_sigma * phi_over_sigma * sp.fhat(i) * sp.fhat(i);
  }
  return acc;
}

std::optional<double> gcv_from_spectrum(const Spectrum& sp, double lambda) {
  double trace = 0.0;
  for (Eigen::Index i = 0; i < sp.sigma.size(); ++i) {
    const double s2 = sp.sigma(i) * sp.sigma(i);
    trace += s2 / (s2 + lambda * lambda);
  }
  const double den = static_cast<double>(sp.n_data) - trace;
  if (den <= 0.0) return std::nullopt;
  return rho_squared(sp, lambda) / (den * den);
}

struct GridScan {
  double lambda = 0.0;
  std::vector<std::pair<double, double>> trace;
};

GridScan scan_gcv(const Spectrum& sp, const Vector& grid) {
  GridScan out;
  bool found = false;
  double best = 0.0;
  out.trace.reserve(static_cast<std::size_t>(grid.size()));
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const auto g = gcv_from_spectrum(sp, grid(i));
    if (!g) continue;
    out.trace.emplace_back(grid(i), *g);
    if (!found || *g < best) {
      found = true;
      best = *g;
      out.lambda = grid(i);
    }
  }
  if (!found)
    throw std::runtime_error(
        "select_lambda_gcv: every grid point excluded (degenerate trace "
        "denominator)");
  return out;
}

// Tikhonov solution in spectral coordinates: coefficients on the retained
// right singular vectors.
Vector tikhonov_coefficients(const Spectrum& sp, double lambda) {
  Vector y(sp.sigma.size());
  for (Eigen::Index i = 0; i < sp.sigma.size(); ++i) {
    const double s2 = sp.sigma(i) * sp.sigma(i);
    y(i) = sp.sigma(i) / (s2 + lambda * lambda) * sp.fhat(i);
  }
  return y;
}

// Projected problem data from a GKB factorization: full SVD of the small
// bidiagonal C and the rotated right-hand side beta1 e1.
struct ProjectedSvd {
  Matrix U;                 // (s+1) x (s+1)
  Vector sigma_retained;    // numerical-rank filtered
  Matrix V;                 // s x s
  Vector fhat_full;         // U^T (beta1 e1), length s+1
  Spectrum spectrum;        // retained view, n_data = s+1
};

ProjectedSvd project(const Matrix& c, double beta1) {
  ProjectedSvd p;
  Eigen::JacobiSVD<Matrix> dec(c, Eigen::ComputeFullU | Eigen::ComputeThinV);
  p.U = dec.matrixU();
  p.V = dec.matrixV();
  const Vector& sv = dec.singularValues();
  const double thresh =
      sv.size() == 0 ? 0.0
                     : sv(0) * static_cast<double>(std::max(c.rows(),
                                                            c.cols())) * kEps;
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > thresh) ++r;
  p.sigma_retained = sv.head(r);
  p.fhat_full = beta1 * p.U.row(0).transpose();  // U^T e1 is U's first row
  p.spectrum.sigma = p.sigma_retained;
  p.spectrum.fhat = p.fhat_full.head(r);
  p.spectrum.out_energy =
      std::max(0.0, beta1 * beta1 - p.spectrum.fhat.squaredNorm());
  p.spectrum.n_data = c.rows();
  return p;
}

}  // namespace

Vector LambdaGrid::points(double sigma1) const {
  if (!(sigma1 > 0.0))
    throw std::invalid_argument("LambdaGrid: sigma1 must be positive");
  if (count < 1 || !(min_factor > 0.0) || !(max_factor >= min_factor))
    throw std::invalid_argument("LambdaGrid: invalid grid parameters");
  Vector g(count);
  if (count == 1) {
    g(0) = min_factor * sigma1;
    return g;
  }
  const double lo = std::log(min_factor * sigma1);
  const double hi = std::log(max_factor * sigma1);
  for (int i = 0; i < count; ++i)
    g(i) = std::exp(lo + (hi - lo) * static_cast<double>(i) /
                             static_cast<double>(count - 1));
  return g;
}

SvdFactors svd(const Matrix& a) {
  if (!a.allFinite())
    throw std::invalid_argument("svd: matrix has non-finite entries");
  Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = dec.singularValues();
  const double thresh =
      sv.size() == 0 ? 0.0
                     : sv(0) * static_cast<double>(std::max(a.rows(),
                                                            a.cols())) * kEps;
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > thresh) ++r;
  SvdFactors out;
  out.U = dec.matrixU().leftCols(r);
  out.sigma = sv.head(r);
  out.V = dec.matrixV().leftCols(r);
  out.rows = a.rows();
  return out;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Tsvd: return "tsvd";
    case Method::IneTsvd: return "ine_tsvd";
    case Method::TikhRg: return "tikh_rg";
    case Method::Hkt: return "hkt";
    case Method::RegGmres: return "reg_gmres";
  }
  return "?";
}

SolveReport tsvd_solve(const SvdFactors& s, const Vector& f, Eigen::Index k) {
  if (k < 1 || k > s.rank())
    throw std::invalid_argument("tsvd_solve: k out of range");
  WallTimer timer;
  const Spectrum sp = full_spectrum(s, f);
  Vector y = Vector::Zero(s.rank());
  for (Eigen::Index i = 0; i < k; ++i) y(i) = sp.fhat(i) / sp.sigma(i);
  SolveReport rep;
  rep.method = Method::Tsvd;
  rep.alpha = s.V * y;
  rep.param = static_cast<double>(k);
  double rho2 = sp.out_energy;
  for (Eigen::Index i = k; i < s.rank(); ++i)
    rho2 += sp.fhat(i) * sp.fhat(i);
  rep.rho = std::sqrt(rho2);
  rep.eta = y.norm();
  rep.wall_seconds = timer.seconds();
  return rep;
}

SolveReport tikhonov_filter_solve(const SvdFactors& s, const Vector& f,
                                  double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("tikhonov_filter_solve: lambda must be > 0");
  WallTimer timer;
  const Spectrum sp = full_spectrum(s, f);
  const Vector y = tikhonov_coefficients(sp, lambda);
  SolveReport rep;
  rep.method = Method::TikhRg;
  rep.alpha = s.V * y;
  rep.param = lambda;
  rep.rho = std::sqrt(rho_squared(sp, lambda));
  rep.eta = std::sqrt(eta_squared(sp, lambda));
  rep.wall_seconds = timer.seconds();
  return rep;
}

std::optional<double> gcv_value(const SvdFactors& s, const Vector& f,
                                double lambda, Eigen::Index n_data) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("gcv_value: lambda must be > 0");
  Spectrum sp = full_spectrum(s, f);
  sp.n_data = n_data;
  return gcv_from_spectrum(sp, lambda);
}

GcvSelection select_lambda_gcv(const SvdFactors& s, const Vector& f,
                               const Vector& grid) {
  if (grid.size() == 0)
    throw std::invalid_argument("select_lambda_gcv: empty grid");
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    if (!(grid(i) > grid(i - 1)))
      throw std::invalid_argument("select_lambda_gcv: grid must be ascending");
  const Spectrum sp = full_spectrum(s, f);
  GridScan scan = scan_gcv(sp, grid);
  return GcvSelection{scan.lambda, std::move(scan.trace)};
}

LcurveCorner lcurve_corner(const std::vector<LcurveSample>& samples) {
  if (samples.size() < 5)
    throw std::invalid_argument("lcurve_corner: need at least 5 samples");
  const auto n = static_cast<Eigen::Index>(samples.size());
  Vector t(n), x(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    if (i > 0 && !(s.lambda > samples[static_cast<std::size_t>(i - 1)].lambda))
      throw std::invalid_argument("lcurve_corner: lambdas must ascend");
    if (!(s.rho > 0.0) || !(s.eta > 0.0))
      throw std::invalid_argument(
          "lcurve_corner: rho and eta must be positive");
    t(i) = std::log(s.lambda);
    x(i) = std::log(s.rho);
    y(i) = std::log(s.eta);
  }

  // Signed curvature at interior samples from non-uniform central
  // differences in the log-lambda parameterization.
  Vector curv(n - 2);
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double hl = t(i) - t(i - 1);
    const double hr = t(i + 1) - t(i);
    const double xp = (x(i + 1) - x(i - 1)) / (hl + hr);
    const double yp = (y(i + 1) - y(i - 1)) / (hl + hr);
    const double xpp =
        2.0 * ((x(i + 1) - x(i)) / hr - (x(i) - x(i - 1)) / hl) / (hl + hr);
    const double ypp =
        2.0 * ((y(i + 1) - y(i)) / hr - (y(i) - y(i - 1)) / hl) / (hl + hr);
    const double speed2 = xp * xp + yp * yp;
    curv(i - 1) = speed2 > 0.0 ? (xp * ypp - yp * xpp) / std::pow(speed2, 1.5)
                               : 0.0;
  }

  Eigen::Index best = 0;
  curv.maxCoeff(&best);
  std::vector<double> magnitudes(static_cast<std::size_t>(curv.size()));
  for (Eigen::Index i = 0; i < curv.size(); ++i)
    magnitudes[static_cast<std::size_t>(i)] = std::abs(curv(i));
  std::nth_element(magnitudes.begin(),
                   magnitudes.begin() + magnitudes.size() / 2,
                   magnitudes.end());
  const double median = magnitudes[magnitudes.size() / 2];

  LcurveCorner out;
  out.lambda = samples[static_cast<std::size_t>(best + 1)].lambda;
  out.curvature = curv(best);
  // Not a corner if the maximum does not stand out from the median or
  // the whole curve is flat to roundoff.
  out.low_confidence = !(curv(best) > 10.0 * median && curv(best) > 1e-10);
  return out;
}

Eigen::Index rank_rule_gcv(const Vector& sigma_ritz, const Vector& fhat,
                           Eigen::Index ell) {
  if (ell < 1) throw std::invalid_argument("rank_rule_gcv: ell must be >= 1");
  const Eigen::Index kmax = sigma_ritz.size();
  if (kmax < 1)
    throw std::invalid_argument("rank_rule_gcv: empty Ritz spectrum");
  // Suffix sums of fhat^2: tail(k) = sum_{i > k} fhat_i^2.
  Vector tail = Vector::Zero(fhat.size() + 1);
  for (Eigen::Index i = fhat.size() - 1; i >= 0; --i)
    tail(i) = tail(i + 1) + fhat(i) * fhat(i);
  Eigen::Index best_k = 1;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 1; k <= kmax; ++k) {
    const double den = static_cast<double>(ell + 1 - k);
    const double value = tail(std::min<Eigen::Index>(k, fhat.size())) /
                         (den * den);
    if (value < best) {
      best = value;
      best_k = k;
    }
  }
  return best_k;
}

SolveReport ine_tsvd(const Matrix& a, const Vector& f, Eigen::Index ell,
                     std::optional<Eigen::Index> k, RankRule rule) {
  if (ell > a.cols())
    throw std::invalid_argument("ine_tsvd: ell exceeds matrix dimension");
  if (k && (*k < 1 || *k > ell))
    throw std::invalid_argument("ine_tsvd: k out of range");
  WallTimer timer;
  const GkbFactorization fac = gkb(a, f, ell, Reorth::Full);
  if (fac.steps_completed == 0)
    throw std::runtime_error("ine_tsvd: bidiagonalization broke down at the "
                             "first step (f orthogonal to range(A))");
  const ProjectedSvd proj = project(fac.C, fac.beta1);
  const Eigen::Index r = proj.sigma_retained.size();

  Eigen::Index kk = 1;
  if (k) {
    kk = std::min(*k, r);  // breakdown may leave fewer usable modes
  } else {
    switch (rule) {
      case RankRule::TruncationGcv:
        kk = rank_rule_gcv(proj.sigma_retained, proj.fhat_full,
                           fac.steps_completed);
        break;
    }
  }

  Vector y = Vector::Zero(fac.steps_completed);
  for (Eigen::Index i = 0; i < kk; ++i)
    y += proj.fhat_full(i) / proj.sigma_retained(i) * proj.V.col(i);

  SolveReport rep;
  rep.method = Method::IneTsvd;
  rep.alpha = fac.Z * y;
  rep.param = static_cast<double>(kk);
  rep.rho = (a * rep.alpha - f).norm();
  rep.eta = rep.alpha.norm();
  rep.iterations = fac.steps_completed;
  rep.wall_seconds = timer.seconds();
  return rep;
}

SolveReport hkt_solve(const Matrix& a, const Vector& f, Eigen::Index ell,
                      SelectionRule rule, const LambdaGrid& grid) {
  if (ell < 1 || ell > a.cols())
    throw std::invalid_argument("hkt_solve: ell out of range");
  WallTimer timer;
  const GkbFactorization fac = gkb(a, f, ell, Reorth::Full);
  if (fac.steps_completed == 0)
    throw std::runtime_error("hkt_solve: bidiagonalization broke down at the "
                             "first step (f orthogonal to range(A))");
  const ProjectedSvd proj = project(fac.C, fac.beta1);
  const Vector lambdas = grid.points(proj.sigma_retained(0));

  SolveReport rep;
  rep.method = Method::Hkt;
  double lambda = 0.0;
  if (rule == SelectionRule::Gcv) {
    GridScan scan = scan_gcv(proj.spectrum, lambdas);
    lambda = scan.lambda;
    rep.gcv_trace = std::move(scan.trace);
  } else {
    std::vector<LcurveSample> samples;
    samples.reserve(static_cast<std::size_t>(lambdas.size()));
    for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
      const double rho = std::sqrt(rho_squared(proj.spectrum, lambdas(i)));
      const double eta = std::sqrt(eta_squared(proj.spectrum, lambdas(i)));
      if (rho > 0.0 && eta > 0.0) samples.push_back({lambdas(i), rho, eta});
    }
    const LcurveCorner corner = lcurve_corner(samples);
    lambda = corner.lambda;
    rep.lcurve_trace.reserve(samples.size());
    for (const auto& s : samples)
      rep.lcurve_trace.push_back(
          {s.lambda, std::log(s.rho), std::log(s.eta)});
  }

  // Solution of (C^T C + lambda^2 I) y = C^T (beta1 e1) through the
  // projected SVD filter factors (identical algebra, no squared
  // conditioning).
  const Vector y_spec = tikhonov_coefficients(proj.spectrum, lambda);
  const Vector y = proj.V.leftCols(y_spec.size()) * y_spec;

  rep.alpha = fac.Z * y;
  rep.param = lambda;
  rep.rho = (a * rep.alpha - f).norm();
  rep.eta = rep.alpha.norm();
  rep.iterations = fac.steps_completed;
  rep.wall_seconds = timer.seconds();
  return rep;
}

SolveReport reg_gmres(const Matrix& a, const Vector& f, Eigen::Index m,
                      const LambdaGrid& grid, const Vector* reference) {
  const Eigen::Index n = a.rows();
  if (m < 1 || m > n)
    throw std::invalid_argument("reg_gmres: m out of range");
  WallTimer timer;
  const double beta = f.norm();
  if (beta == 0.0) throw std::invalid_argument("reg_gmres: f must be nonzero");

  Matrix V(n, m + 1);
  Matrix H = Matrix::Zero(m + 1, m);
  V.col(0) = f / beta;

  SolveReport rep;
  rep.method = Method::RegGmres;
  const double ref_norm = reference ? reference->norm() : 0.0;

  Eigen::Index steps = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    Vector w = a * V.col(j);
    for (Eigen::Index i = 0; i <= j; ++i) {
      H(i, j) = V.col(i).dot(w);
      w -= H(i, j) * V.col(i);
    }
    H(j + 1, j) = w.norm();
    if (!H.col(j).allFinite())
      throw std::runtime_error("reg_gmres: non-finite Arnoldi recurrence");
    steps = j + 1;
    const bool happy = H(j + 1, j) <= 100.0 * kEps * H.topLeftCorner(j + 2, j + 1).norm();
    if (!happy) V.col(j + 1) = w / H(j + 1, j);

    // Tikhonov on the projected problem min ||H y - beta e1|| + lambda ||y||
    // with lambda from GCV on the surrogate.
    const ProjectedSvd proj = project(H.topLeftCorner(j + 2, j + 1), beta);
    if (proj.sigma_retained.size() == 0)
      throw std::runtime_error("reg_gmres: projected problem has rank zero");
    const Vector lambdas = grid.points(proj.sigma_retained(0));
    GridScan scan = scan_gcv(proj.spectrum, lambdas);
    const Vector y_spec = tikhonov_coefficients(proj.spectrum, scan.lambda);
    const Vector y = proj.V.leftCols(y_spec.size()) * y_spec;
    rep.alpha = V.leftCols(j + 1) * y;
    rep.param = scan.lambda;

    IterationSample sample;
    sample.iteration = j + 1;
    sample.residual_norm =
        (H.topLeftCorner(j + 2, j + 1) * y -
         beta * Vector::Unit(j + 2, 0))
            .norm();
    sample.error_norm =
        reference ? (rep.alpha - *reference).norm() / ref_norm
                  : std::numeric_limits<double>::quiet_NaN();
    rep.iteration_trace.push_back(sample);
    if (j + 1 == m || happy) {
      rep.gcv_trace = std::move(scan.trace);
      break;
    }
  }

  rep.rho = (a * rep.alpha - f).norm();
  rep.eta = rep.alpha.norm();
  rep.iterations = steps;
  rep.wall_seconds = timer.seconds();
  return rep;
}

void write_gcv_trace_csv(const std::vector<std::pair<double, double>>& trace,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  out << "lambda,gcv\n";
  out.precision(17);
  for (const auto& [lambda, gcv] : trace)
    out << lambda << "," << gcv << "\n";
  if (!out) throw ParseError("write failed: " + path);
}

void write_lcurve_trace_csv(
    const std::vector<std::array<double, 3>>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  out << "lambda,log_rho,log_eta\n";
  out.precision(17);
  for (const auto& row : trace)
    out << row[0] << "," << row[1] << "," << row[2] << "\n";
  if (!out) throw ParseError("write failed: " + path);
}

}  // namespace mqhelm
