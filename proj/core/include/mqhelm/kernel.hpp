#pragma once

#include "mqhelm/types.hpp"

namespace mqhelm {

// Shape parameter of the multiquadric basis phi(r) = sqrt(1 + (eps*r)^2).
// Small epsilon flattens the basis: accuracy improves, conditioning degrades.
struct KernelParams {
  double epsilon;

  explicit KernelParams(double eps) : epsilon(eps) {
    if (!(eps > 0.0))
      throw std::invalid_argument("KernelParams: epsilon must be positive");
  }
};

// phi(r) = sqrt(1 + eps^2 r^2); phi(0) = 1, strictly increasing in r.
double mq_value(double r, const KernelParams& p);

// phi'(r) = eps^2 r / sqrt(1 + eps^2 r^2).
double mq_radial_derivative(double r, const KernelParams& p);

// 3D Laplacian of phi: eps^2 (3 + 2 eps^2 r^2) / (1 + eps^2 r^2)^{3/2}.
// The closed form absorbs the removable singularity of phi'' + 2 phi'/r
// at r = 0 (value 3 eps^2).
double mq_laplacian3d(double r, const KernelParams& p);

// Helmholtz operator applied to phi: Laplacian + k^2 phi.
double mq_helmholtz(double r, const KernelParams& p, double wavenumber);

// Directional derivative of phi(||x - center||) along `normal`:
// phi'(r) * ((x - center) . normal) / r, and 0 at x == center where the
// gradient vanishes. `normal` is expected to be unit length.
double mq_normal_derivative(const Vec3& x, const Vec3& center,
                            const Vec3& normal, const KernelParams& p);

}  // namespace mqhelm
