#include "mqhelm/kernel.hpp"

#include <cmath>

namespace mqhelm {

double mq_value(double r, const KernelParams& p) {
  const double t = p.epsilon * r;
  return std::sqrt(1.0 + t * t);
}

double mq_radial_derivative(double r, const KernelParams& p) {
  const double e2 = p.epsilon * p.epsilon;
  return e2 * r / std::sqrt(1.0 + e2 * r * r);
}

double mq_laplacian3d(double r, const KernelParams& p) {
  const double e2 = p.epsilon * p.epsilon;
  const double s = 1.0 + e2 * r * r;
  return e2 * (3.0 + 2.0 * e2 * r * r) / (s * std::sqrt(s));
}

double mq_helmholtz(double r, const KernelParams& p, double wavenumber) {
  return mq_laplacian3d(r, p) + wavenumber * wavenumber * mq_value(r, p);
}

double mq_normal_derivative(const Vec3& x, const Vec3& center,
                            const Vec3& normal, const KernelParams& p) {
  const Vec3 d = x - center;
  const double r = d.norm();
  if (r == 0.0) return 0.0;  // phi' vanishes linearly at the center
  return mq_radial_derivative(r, p) * d.dot(normal) / r;
}

}  // namespace mqhelm
