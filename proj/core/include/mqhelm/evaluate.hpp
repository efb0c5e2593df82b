#pragma once

#include "mqhelm/kernel.hpp"
#include "mqhelm/point_set.hpp"
#include "mqhelm/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mqhelm {

// Gaussian manufactured solution u(x) = exp(-||x - center||^2 / sigma)
// paired with the source that makes it solve the Helmholtz equation.
struct ManufacturedCase {
  Vec3 center;
  double sigma;       // > 0
  double wavenumber;  // >= 0
  std::string name;
};

ManufacturedCase cube_case(double wavenumber = 3.0);
ManufacturedCase sphere_case(double wavenumber = 3.0);
ManufacturedCase pump_case(double wavenumber = 3.0);
std::optional<ManufacturedCase> manufactured_case(const std::string& name,
                                                  double wavenumber = 3.0);

double exact_u(const ManufacturedCase& c, const Vec3& x);

// f = Delta u + k^2 u = u * (4 r^2 / sigma^2 - 6 / sigma + k^2).
double manufactured_source(const ManufacturedCase& c, const Vec3& x);

// u(X) ~ sum_j alpha_j phi(||X - X_j||) evaluated at each target.
std::vector<double> reconstruct(const Vector& alpha, const PointSet& centers,
                                const KernelParams& p,
                                std::span<const Vec3> targets);

// ||u - u_a||_inf / ||u||_inf.
double relative_error(std::span<const double> exact,
                      std::span<const double> approx);

}  // namespace mqhelm
