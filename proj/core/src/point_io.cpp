#include "mqhelm/point_set.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace mqhelm {

namespace {

std::string with_line(const std::string& path, std::size_t line,
                      const std::string& msg) {
  std::ostringstream os;
  os << path << ":" << line << ": " << msg;
  return os.str();
}

}  // namespace

PointSet import_point_cloud(const std::string& path,
                            std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open point cloud file: " + path);

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line))
    throw ParseError(with_line(path, 1, "empty file, expected 'pointset v1'"));
  ++lineno;
  {
    std::istringstream hs(line);
    std::string word, ver;
    hs >> word >> ver;
    if (word != "pointset" || ver != "v1")
      throw ParseError(
          with_line(path, lineno, "expected header 'pointset v1'"));
  }

  std::vector<Vec3> interior;
  std::vector<BoundaryPoint> boundary;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;  // blank line
    if (tag[0] == '#') continue;
    if (tag == "I") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z()))
        throw ParseError(
            with_line(path, lineno, "malformed interior point line"));
      interior.push_back(p);
    } else if (tag == "B") {
      Vec3 p, n;
      if (!(ls >> p.x() >> p.y() >> p.z() >> n.x() >> n.y() >> n.z()))
        throw ParseError(
            with_line(path, lineno, "malformed boundary point line"));
      const double len = n.norm();
      if (std::abs(len - 1.0) > 1e-10) {
        if (std::abs(len - 1.0) > 0.1)
          throw ParseError(with_line(
              path, lineno, "boundary normal deviates from unit length by "
                            "more than 10%"));
        if (warnings)
          warnings->push_back(
              with_line(path, lineno, "normal renormalized to unit length"));
        n /= len;
      }
      boundary.push_back({p, n});
    } else {
      throw ParseError(
          with_line(path, lineno, "unknown record tag '" + tag + "'"));
    }
  }
  return PointSet(std::move(interior), std::move(boundary), path);
}

void write_point_cloud(const PointSet& points, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  out << "pointset v1\n";
  out.precision(17);
  for (const auto& p : points.interior())
    out << "I " << p.x() << " " << p.y() << " " << p.z() << "\n";
  for (const auto& b : points.boundary())
    out << "B " << b.position.x() << " " << b.position.y() << " "
        << b.position.z() << " " << b.normal.x() << " " << b.normal.y() << " "
        << b.normal.z() << "\n";
  if (!out) throw ParseError("write failed: " + path);
}

namespace {

struct MshElement {
  int type = 0;
  std::vector<std::size_t> nodes;
};

}  // namespace

PointSet import_msh_nodes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open msh file: " + path);

  std::map<std::size_t, Vec3> nodes;
  std::vector<MshElement> elements;
  bool saw_nodes = false, saw_elements = false;

  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string section;
    ls >> section;
    if (section == "$MeshFormat") {
      if (!std::getline(in, line))
        throw ParseError(path + ": truncated $MeshFormat section");
      std::istringstream vs(line);
      double version = 0.0;
      vs >> version;
      if (!(version >= 2.0 && version < 3.0))
        throw ParseError(path + ": unsupported MSH version (need ASCII v2)");
    } else if (section == "$Nodes") {
      saw_nodes = true;
      if (!std::getline(in, line))
        throw ParseError(path + ": truncated $Nodes section");
      std::size_t count = 0;
      std::istringstream cs(line);
      if (!(cs >> count))
        throw ParseError(path + ": malformed node count in $Nodes");
      for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line))
          throw ParseError(path + ": truncated $Nodes section");
        std::istringstream ns(line);
        std::size_t id = 0;
        Vec3 p;
        if (!(ns >> id >> p.x() >> p.y() >> p.z()))
          throw ParseError(path + ": malformed node line in $Nodes");
        nodes[id] = p;
      }
    } else if (section == "$Elements") {
      saw_elements = true;
      if (!std::getline(in, line))
        throw ParseError(path + ": truncated $Elements section");
      std::size_t count = 0;
      std::istringstream cs(line);
      if (!(cs >> count))
        throw ParseError(path + ": malformed element count in $Elements");
      for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line))
          throw ParseError(path + ": truncated $Elements section");
        std::istringstream es(line);
        std::size_t id = 0;
        int type = 0, ntags = 0;
        if (!(es >> id >> type >> ntags))
          throw ParseError(path + ": malformed element line in $Elements");
        for (int t = 0; t < ntags; ++t) {
          int tag;
          if (!(es >> tag))
            throw ParseError(path + ": malformed element tags in $Elements");
        }
        int nn = 0;
        if (type == 2) nn = 3;        // triangle
        else if (type == 3) nn = 4;   // quad
        else if (type == 4) nn = 4;   // tetrahedron
        else continue;                // other element types are ignored
        MshElement el;
        el.type = type;
        for (int t = 0; t < nn; ++t) {
          std::size_t nid;
          if (!(es >> nid))
            throw ParseError(path + ": element references missing node ids");
          el.nodes.push_back(nid);
        }
        elements.push_back(std::move(el));
      }
    }
  }
  if (!saw_nodes) throw ParseError(path + ": missing $Nodes section");
  if (!saw_elements) throw ParseError(path + ": missing $Elements section");

  for (const auto& el : elements)
    for (std::size_t nid : el.nodes)
      if (!nodes.count(nid))
        throw ParseError(path + ": element references unknown node id " +
                         std::to_string(nid));

  Vec3 centroid = Vec3::Zero();
  for (const auto& [id, p] : nodes) centroid += p;
  centroid /= static_cast<double>(nodes.size());

  // Accumulate per-node normals from incident surface elements, each face
  // normal oriented away from the centroid.
  std::map<std::size_t, Vec3> normal_sum;
  for (const auto& el : elements) {
    if (el.type != 2 && el.type != 3) continue;
    const Vec3& a = nodes[el.nodes[0]];
    const Vec3& b = nodes[el.nodes[1]];
    const Vec3& c = nodes[el.nodes[2]];
    Vec3 n = el.type == 2 ? Vec3((b - a).cross(c - a))
                          : Vec3((c - a).cross(nodes[el.nodes[3]] - b));
    const double len = n.norm();
    if (len == 0.0) continue;  // degenerate face contributes nothing
    n /= len;
    Vec3 face_center = Vec3::Zero();
    for (std::size_t nid : el.nodes) face_center += nodes[nid];
    face_center /= static_cast<double>(el.nodes.size());
    if (n.dot(face_center - centroid) < 0.0) n = -n;
    for (std::size_t nid : el.nodes) {
      auto [it, inserted] = normal_sum.try_emplace(nid, Vec3::Zero());
      it->second += n;
    }
  }

  std::vector<Vec3> interior;
  std::vector<BoundaryPoint> boundary;
  for (const auto& [id, p] : nodes) {
    auto it = normal_sum.find(id);
    if (it == normal_sum.end()) {
      interior.push_back(p);
    } else {
      Vec3 n = it->second;
      const double len = n.norm();
      if (len == 0.0)
        throw ParseError(path + ": incident face normals cancel at node " +
                         std::to_string(id));
      boundary.push_back({p, n / len});
    }
  }
  return PointSet(std::move(interior), std::move(boundary), path);
}

}  // namespace mqhelm
