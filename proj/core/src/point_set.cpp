#include "mqhelm/point_set.hpp"

#include "mqhelm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mqhelm {

namespace {

constexpr double kNormalTol = 1e-10;

// Outward unit normal for a cube face; faces are indexed x=0, x=1, y=0,
// y=1, z=0, z=1 and edge/corner nodes take the lowest incident face.
Vec3 cube_face_normal(const Vec3& p) {
  if (p.x() == 0.0) return {-1.0, 0.0, 0.0};
  if (p.x() == 1.0) return {1.0, 0.0, 0.0};
  if (p.y() == 0.0) return {0.0, -1.0, 0.0};
  if (p.y() == 1.0) return {0.0, 1.0, 0.0};
  if (p.z() == 0.0) return {0.0, 0.0, -1.0};
  return {0.0, 0.0, 1.0};
}

bool on_cube_face(const Vec3& p) {
  for (int c = 0; c < 3; ++c)
    if (p[c] == 0.0 || p[c] == 1.0) return true;
  return false;
}

// Boundary nodes of an m x m x m grid over [0,1]^3.
std::vector<BoundaryPoint> cube_boundary_grid(Eigen::Index m) {
  std::vector<BoundaryPoint> out;
  const double h = 1.0 / static_cast<double>(m - 1);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index k = 0; k < m; ++k) {
        const Vec3 p{i == m - 1 ? 1.0 : static_cast<double>(i) * h,
                     j == m - 1 ? 1.0 : static_cast<double>(j) * h,
                     k == m - 1 ? 1.0 : static_cast<double>(k) * h};
        if (on_cube_face(p)) out.push_back({p, cube_face_normal(p)});
      }
  return out;
}

Eigen::Index cube_boundary_count(Eigen::Index m) {
  return m * m * m - (m - 2) * (m - 2) * (m - 2);
}

// Quasi-uniform boundary share for n nodes in the unit ball: with spacing h,
// N ~ (4pi/3)/h^3 inside and N_B ~ 4pi/h^2 on the sphere.
Eigen::Index sphere_boundary_count(Eigen::Index n_target) {
  const double c = 4.0 * M_PI * std::pow(3.0 / (4.0 * M_PI), 2.0 / 3.0);
  const auto nb = static_cast<Eigen::Index>(
      std::llround(c * std::pow(static_cast<double>(n_target), 2.0 / 3.0)));
  return std::min(nb, n_target - 1);
}

std::vector<BoundaryPoint> fibonacci_sphere(Eigen::Index count) {
  std::vector<BoundaryPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  const double golden = M_PI * (1.0 + std::sqrt(5.0));
  for (Eigen::Index i = 0; i < count; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
    const double polar = std::acos(1.0 - 2.0 * t);
    const double azimuth = golden * (static_cast<double>(i) + 0.5);
    Vec3 q{std::cos(azimuth) * std::sin(polar),
           std::sin(azimuth) * std::sin(polar), std::cos(polar)};
    q.normalize();
    out.push_back({q, q});
  }
  return out;
}

}  // namespace

PointSet::PointSet(std::vector<Vec3> interior,
                   std::vector<BoundaryPoint> boundary, std::string label)
    : interior_(std::move(interior)),
      boundary_(std::move(boundary)),
      label_(std::move(label)) {
  if (interior_.empty())
    throw ValidationError("PointSet '" + label_ + "': N_I >= 1 required");
  if (boundary_.empty())
    throw ValidationError("PointSet '" + label_ + "': N_B >= 1 required");
  for (const auto& b : boundary_) {
    if (std::abs(b.normal.norm() - 1.0) > kNormalTol)
      throw ValidationError("PointSet '" + label_ +
                            "': boundary normal is not unit length");
  }
  const Eigen::Index n = total_count();
  double min_d2 = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      min_d2 = std::min(min_d2, (node(i) - node(j)).squaredNorm());
  if (!(min_d2 > 0.0))
    throw ValidationError("PointSet '" + label_ + "': duplicate points");
  min_pairwise_distance_ = std::sqrt(min_d2);
}

double halton(std::uint64_t index, unsigned base) {
  if (index < 1) throw std::invalid_argument("halton: index must be >= 1");
  if (base < 2) throw std::invalid_argument("halton: base must be >= 2");
  double f = 1.0;
  double value = 0.0;
  while (index > 0) {
    f /= static_cast<double>(base);
    value += f * static_cast<double>(index % base);
    index /= base;
  }
  return value;
}

PointSet generate_cube(Eigen::Index n_target, const Distribution& dist) {
  if (n_target < 27)
    throw std::invalid_argument("generate_cube: n_target must be >= 27");

  if (dist.kind == Distribution::Kind::Uniform) {
    const auto m = static_cast<Eigen::Index>(std::ceil(
        std::cbrt(static_cast<double>(n_target)) - 1e-9));
    const double h = 1.0 / static_cast<double>(m - 1);
    std::vector<Vec3> interior;
    std::vector<BoundaryPoint> boundary;
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index k = 0; k < m; ++k) {
          const Vec3 p{i == m - 1 ? 1.0 : static_cast<double>(i) * h,
                       j == m - 1 ? 1.0 : static_cast<double>(j) * h,
                       k == m - 1 ? 1.0 : static_cast<double>(k) * h};
          if (on_cube_face(p))
            boundary.push_back({p, cube_face_normal(p)});
          else
            interior.push_back(p);
        }
    return PointSet(std::move(interior), std::move(boundary), "cube/uniform");
  }

  // Random/Halton: structured boundary grid sized to the surface share of
  // n_target, remaining nodes drawn in the open cube.
  auto m = static_cast<Eigen::Index>(
      std::llround(std::cbrt(static_cast<double>(n_target))));
  m = std::max<Eigen::Index>(m, 3);
  while (m > 3 && cube_boundary_count(m) + 1 > n_target) --m;
  std::vector<BoundaryPoint> boundary = cube_boundary_grid(m);
  const Eigen::Index n_interior =
      n_target - static_cast<Eigen::Index>(boundary.size());

  std::vector<Vec3> interior;
  interior.reserve(static_cast<std::size_t>(n_interior));
  if (dist.kind == Distribution::Kind::Random) {
    Rng rng(dist.seed);
    for (Eigen::Index i = 0; i < n_interior; ++i)
      interior.emplace_back(rng.uniform_open(), rng.uniform_open(),
                            rng.uniform_open());
    return PointSet(std::move(interior), std::move(boundary), "cube/random");
  }
  for (Eigen::Index i = 0; i < n_interior; ++i) {
    const std::uint64_t idx = dist.start_index + static_cast<std::uint64_t>(i);
    interior.emplace_back(halton(idx, 2), halton(idx, 3), halton(idx, 5));
  }
  return PointSet(std::move(interior), std::move(boundary), "cube/halton");
}

PointSet generate_sphere(Eigen::Index n_target, const Distribution& dist) {
  if (n_target < 30)
    throw std::invalid_argument("generate_sphere: n_target must be >= 30");

  const Eigen::Index nb = sphere_boundary_count(n_target);
  std::vector<BoundaryPoint> boundary = fibonacci_sphere(nb);

  std::vector<Vec3> interior;
  if (dist.kind == Distribution::Kind::Uniform) {
    // Largest cube grid whose in-ball nodes fit the interior budget.
    const Eigen::Index budget = n_target - nb;
    Eigen::Index best_m = 3;
    for (Eigen::Index m = 3; m < 4 * n_target; ++m) {
      Eigen::Index count = 0;
      const double h = 2.0 / static_cast<double>(m - 1);
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
          for (Eigen::Index k = 0; k < m; ++k) {
            const Vec3 p{-1.0 + static_cast<double>(i) * h,
                         -1.0 + static_cast<double>(j) * h,
                         -1.0 + static_cast<double>(k) * h};
            if (p.squaredNorm() < 1.0) ++count;
          }
      if (count > budget) break;
      best_m = m;
    }
    const double h = 2.0 / static_cast<double>(best_m - 1);
    for (Eigen::Index i = 0; i < best_m; ++i)
      for (Eigen::Index j = 0; j < best_m; ++j)
        for (Eigen::Index k = 0; k < best_m; ++k) {
          const Vec3 p{-1.0 + static_cast<double>(i) * h,
                       -1.0 + static_cast<double>(j) * h,
                       -1.0 + static_cast<double>(k) * h};
          if (p.squaredNorm() < 1.0) interior.push_back(p);
        }
    return PointSet(std::move(interior), std::move(boundary),
                    "sphere/uniform");
  }

  const Eigen::Index n_interior = n_target - nb;
  interior.reserve(static_cast<std::size_t>(n_interior));
  if (dist.kind == Distribution::Kind::Random) {
    Rng rng(dist.seed);
    while (static_cast<Eigen::Index>(interior.size()) < n_interior) {
      const Vec3 p{rng.uniform_open(-1.0, 1.0), rng.uniform_open(-1.0, 1.0),
                   rng.uniform_open(-1.0, 1.0)};
      if (p.squaredNorm() < 1.0) interior.push_back(p);
    }
    return PointSet(std::move(interior), std::move(boundary), "sphere/random");
  }
  std::uint64_t idx = dist.start_index;
  while (static_cast<Eigen::Index>(interior.size()) < n_interior) {
    const Vec3 p{2.0 * halton(idx, 2) - 1.0, 2.0 * halton(idx, 3) - 1.0,
                 2.0 * halton(idx, 5) - 1.0};
    ++idx;
    if (p.squaredNorm() < 1.0) interior.push_back(p);
  }
  return PointSet(std::move(interior), std::move(boundary), "sphere/halton");
}

}  // namespace mqhelm
