#pragma once

#include "mqhelm/bidiag.hpp"
#include "mqhelm/types.hpp"

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace mqhelm {

// Thin SVD A = U diag(sigma) V^T restricted to the numerical rank
// (sigma_i > sigma_1 * max(N,M) * machine epsilon).
struct SvdFactors {
  Matrix U;      // N x r
  Vector sigma;  // r retained values, non-increasing
  Matrix V;      // M x r
  Eigen::Index rows = 0;  // N of the factored matrix

  Eigen::Index rank() const { return sigma.size(); }
};

SvdFactors svd(const Matrix& a);

enum class Method { Tsvd, IneTsvd, TikhRg, Hkt, RegGmres };
const char* method_name(Method m);

struct IterationSample {
  Eigen::Index iteration;    // 1-based
  double residual_norm;      // projected residual at the chosen lambda
  double error_norm;         // vs caller reference, NaN when absent
};

struct SolveReport {
  Vector alpha;
  Method method = Method::TikhRg;
  double param = 0.0;  // lambda* for Tikhonov-type methods, rank k otherwise
  double rho = 0.0;    // ||A alpha - f||_2
  double eta = 0.0;    // ||alpha||_2
  std::vector<std::pair<double, double>> gcv_trace;  // (lambda, GCV)
  std::vector<std::array<double, 3>> lcurve_trace;   // (lambda, log rho, log eta)
  std::vector<IterationSample> iteration_trace;      // reg_gmres only
  Eigen::Index iterations = 0;
  double wall_seconds = 0.0;
};

// Log-spaced lambda grid, by default 60 points on [1e-14 sigma1, sigma1];
// the observed GCV optima on MQ systems sit many decades below sigma1.
struct LambdaGrid {
  double min_factor = 1e-14;
  double max_factor = 1.0;
  int count = 60;

  Vector points(double sigma1) const;
};

// Hard spectral cutoff keeping the k largest triplets (1 <= k <= rank).
SolveReport tsvd_solve(const SvdFactors& s, const Vector& f, Eigen::Index k);

// Smooth filtering with factors sigma^2 / (sigma^2 + lambda^2).
SolveReport tikhonov_filter_solve(const SvdFactors& s, const Vector& f,
                                  double lambda);

// GCV(lambda) evaluated from the spectrum alone; nullopt when the
// denominator N - trace degenerates (lambda too small on a full-rank
// square system) and the point must be excluded from minimization.
std::optional<double> gcv_value(const SvdFactors& s, const Vector& f,
                                double lambda, Eigen::Index n_data);

struct GcvSelection {
  double lambda;
  std::vector<std::pair<double, double>> trace;
};

// Argmin of gcv_value over an ascending grid; throws if every point is
// excluded.
GcvSelection select_lambda_gcv(const SvdFactors& s, const Vector& f,
                               const Vector& grid);

struct LcurveSample {
  double lambda;
  double rho;
  double eta;
};

struct LcurveCorner {
  double lambda;
  double curvature;
  bool low_confidence;  // max curvature not well separated from the median
};

// Maximum discrete curvature of (log rho, log eta) parameterized by
// log lambda; needs >= 5 ascending samples with positive rho, eta.
LcurveCorner lcurve_corner(const std::vector<LcurveSample>& samples);

enum class SelectionRule { Gcv, Lcurve };

enum class RankRule { TruncationGcv };

// Truncation-GCV rank selection on Ritz data: minimizes
// sum_{i>k} fhat_i^2 / (ell + 1 - k)^2, ties toward smaller k.
Eigen::Index rank_rule_gcv(const Vector& sigma_ritz, const Vector& fhat,
                           Eigen::Index ell);

// Inexpensive TSVD: short GKB run, tiny projected SVD, truncated solve on
// the surrogate, lifted back through Z.
SolveReport ine_tsvd(const Matrix& a, const Vector& f, Eigen::Index ell,
                     std::optional<Eigen::Index> k = std::nullopt,
                     RankRule rule = RankRule::TruncationGcv);

// Hybrid Krylov-Tikhonov: GKB projection, parameter chosen on the
// (ell+1) x ell surrogate by GCV or L-curve, Tikhonov solve lifted back.
SolveReport hkt_solve(const Matrix& a, const Vector& f, Eigen::Index ell,
                      SelectionRule rule = SelectionRule::Gcv,
                      const LambdaGrid& grid = {});

// Tikhonov-regularized GMRES baseline: Arnoldi on A, Tikhonov with
// surrogate GCV on the Hessenberg at every iteration; the returned solution
// is the final iterate and the per-iteration trace exposes semi-convergence
// (error vs `reference` when supplied).
SolveReport reg_gmres(const Matrix& a, const Vector& f, Eigen::Index m,
                      const LambdaGrid& grid = {},
                      const Vector* reference = nullptr);

void write_gcv_trace_csv(const std::vector<std::pair<double, double>>& trace,
                         const std::string& path);
void write_lcurve_trace_csv(
    const std::vector<std::array<double, 3>>& trace, const std::string& path);

}  // namespace mqhelm
