#include "mqhelm/evaluate.hpp"

#include <cmath>

namespace mqhelm {

ManufacturedCase cube_case(double wavenumber) {
  return {Vec3::Zero(), 20.0, wavenumber, "cube"};
}

ManufacturedCase sphere_case(double wavenumber) {
  return {Vec3{0.25, 0.25, 0.0}, 20.0, wavenumber, "sphere"};
}

ManufacturedCase pump_case(double wavenumber) {
  return {Vec3::Zero(), 10.0, wavenumber, "pump"};
}

std::optional<ManufacturedCase> manufactured_case(const std::string& name,
                                                  double wavenumber) {
  if (name == "cube") return cube_case(wavenumber);
  if (name == "sphere") return sphere_case(wavenumber);
  if (name == "pump") return pump_case(wavenumber);
  return std::nullopt;
}

double exact_u(const ManufacturedCase& c, const Vec3& x) {
  return std::exp(-(x - c.center).squaredNorm() / c.sigma);
}

double manufactured_source(const ManufacturedCase& c, const Vec3& x) {
  const double r2 = (x - c.center).squaredNorm();
  const double radial =
      4.0 * r2 / (c.sigma * c.sigma) - 6.0 / c.sigma +
      c.wavenumber * c.wavenumber;
  return exact_u(c, x) * radial;
}

std::vector<double> reconstruct(const Vector& alpha, const PointSet& centers,
                                const KernelParams& p,
                                std::span<const Vec3> targets) {
  if (alpha.size() != centers.total_count())
    throw std::invalid_argument(
        "reconstruct: coefficient count does not match centers");
  std::vector<double> out(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < centers.total_count(); ++j)
      acc += alpha(j) * mq_value((targets[t] - centers.node(j)).norm(), p);
    out[t] = acc;
  }
  return out;
}

double relative_error(std::span<const double> exact,
                      std::span<const double> approx) {
  if (exact.size() != approx.size())
    throw std::invalid_argument("relative_error: length mismatch");
  double max_exact = 0.0, max_diff = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    max_exact = std::max(max_exact, std::abs(exact[i]));
    max_diff = std::max(max_diff, std::abs(exact[i] - approx[i]));
  }
  if (max_exact == 0.0)
    throw std::invalid_argument("relative_error: exact field is zero");
  return max_diff / max_exact;
}

}  // namespace mqhelm
