#pragma once

#include "mqhelm/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mqhelm {

struct BoundaryPoint {
  Vec3 position;
  Vec3 normal;  // outward unit normal
};

// Collocation centers split into interior nodes (where the PDE is enforced)
// and boundary nodes with outward normals (where boundary conditions are
// imposed). Immutable after construction; construction validates that the
// partition is non-degenerate, points are pairwise distinct and normals are
// unit length within 1e-10.
class PointSet {
 public:
  PointSet(std::vector<Vec3> interior, std::vector<BoundaryPoint> boundary,
           std::string label);

  const std::vector<Vec3>& interior() const { return interior_; }
  const std::vector<BoundaryPoint>& boundary() const { return boundary_; }
  const std::string& label() const { return label_; }

  Eigen::Index interior_count() const {
    return static_cast<Eigen::Index>(interior_.size());
  }
  Eigen::Index boundary_count() const {
    return static_cast<Eigen::Index>(boundary_.size());
  }
  Eigen::Index total_count() const {
    return interior_count() + boundary_count();
  }

  // Unified center indexing: interior nodes first, then boundary nodes.
  const Vec3& node(Eigen::Index i) const {
    const Eigen::Index ni = interior_count();
    return i < ni ? interior_[static_cast<std::size_t>(i)]
                  : boundary_[static_cast<std::size_t>(i - ni)].position;
  }

  double min_pairwise_distance() const { return min_pairwise_distance_; }

 private:
  std::vector<Vec3> interior_;
  std::vector<BoundaryPoint> boundary_;
  std::string label_;
  double min_pairwise_distance_ = 0.0;
};

// Node layout request. The seed (random) and start index (Halton) are part
// of the value so that generation is reproducible.
struct Distribution {
  enum class Kind { Random, Uniform, Halton };

  Kind kind = Kind::Uniform;
  std::uint64_t seed = 0;         // Random only
  std::uint64_t start_index = 1;  // Halton only

  static Distribution random(std::uint64_t seed) {
    return {Kind::Random, seed, 1};
  }
  static Distribution uniform() { return {Kind::Uniform, 0, 1}; }
  static Distribution halton(std::uint64_t start_index = 1) {
    return {Kind::Halton, 0, start_index};
  }

  const char* name() const {
    switch (kind) {
      case Kind::Random: return "random";
      case Kind::Uniform: return "uniform";
      case Kind::Halton: return "halton";
    }
    return "?";
  }
};

// Radical inverse of `index` in the given base; index >= 1, base >= 2.
double halton(std::uint64_t index, unsigned base);

// Unit cube [0,1]^3. Uniform: full m^3 grid with m = ceil(n_target^{1/3}).
// Random/Halton: exactly n_target nodes, a structured boundary grid on the
// six faces plus generator-drawn interior points.
PointSet generate_cube(Eigen::Index n_target, const Distribution& dist);

// Unit ball with boundary nodes on the sphere via a Fibonacci lattice
// (normal at q is q itself). Random/Halton interiors are rejection-sampled;
// Uniform uses a pruned cube grid.
PointSet generate_sphere(Eigen::Index n_target, const Distribution& dist);

// Native text format, UTF-8:
//   pointset v1
//   # comment
//   I x y z
//   B x y z nx ny nz
// Normals within 10% of unit length are renormalized with a warning pushed
// to `warnings` (when given); worse ones are errors.
PointSet import_point_cloud(const std::string& path,
                            std::vector<std::string>* warnings = nullptr);
void write_point_cloud(const PointSet& points, const std::string& path);

// ASCII Gmsh MSH v2 subset: $Nodes plus $Elements with types 2 (triangle),
// 3 (quad), 4 (tetrahedron). Nodes referenced by a surface element become
// boundary nodes; their normal is the average of incident face normals
// oriented away from the node centroid.
PointSet import_msh_nodes(const std::string& path);

}  // namespace mqhelm
