#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace mqhelm {

using Vec3 = Eigen::Vector3d;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Real-valued field over R^3 (sources, boundary data, Robin coefficients).
using ScalarField = std::function<double(const Vec3&)>;

// Thrown when an input file cannot be parsed; message names the offending
// line or section.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a constructed object violates a structural invariant
// (duplicate points, non-unit normals, empty partitions, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mqhelm
