#include "fungrasp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>

#include "fungrasp/error.hpp"
#include "json_util.hpp"

namespace fungrasp {

namespace {

constexpr int kLeafSize = 4;
constexpr double kMinTriangleArea = 1e-12;

enum class Region { Face, VertexA, VertexB, VertexC, EdgeAB, EdgeBC, EdgeCA };

struct TriangleHit {
  Vec3 point;
  Region region;
};

// Closest point on triangle abc to p, with the Voronoi region it falls in.
TriangleHit closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return {a, Region::VertexA};

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return {b, Region::VertexB};

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return {a + v * ab, Region::EdgeAB};
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return {c, Region::VertexC};

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return {a + w * ac, Region::EdgeCA};
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {b + w * (c - b), Region::EdgeBC};
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return {a + ab * v + ac * w, Region::Face};
}

double box_squared_distance(const Eigen::AlignedBox3d& box, const Vec3& p) {
  const Vec3 d = (box.min() - p).cwiseMax(p - box.max()).cwiseMax(0.0);
  return d.squaredNorm();
}

double corner_angle(const Vec3& at, const Vec3& u, const Vec3& v) {
  const Vec3 e1 = (u - at).normalized();
  const Vec3 e2 = (v - at).normalized();
  return std::atan2(e1.cross(e2).norm(), e1.dot(e2));
}

void orient_outward_convex(const std::vector<Vec3>& verts, std::vector<TriMeshObject::Triangle>& tris) {
  for (auto& t : tris) {
    const Vec3 n = (verts[t[1]] - verts[t[0]]).cross(verts[t[2]] - verts[t[0]]);
    const Vec3 centroid = (verts[t[0]] + verts[t[1]] + verts[t[2]]) / 3.0;
    if (n.dot(centroid) < 0.0) std::swap(t[1], t[2]);
  }
}

}  // namespace

TriMeshObject::TriMeshObject(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  if (vertices_.empty() || triangles_.empty()) throw ValidationError("mesh is empty");
  const int nv = static_cast<int>(vertices_.size());
  for (const auto& v : vertices_)
    if (!v.allFinite()) throw ValidationError("mesh has a non-finite vertex");

  // Directed edge -> (triangle, local edge). Watertight + consistent winding
  // means every directed edge occurs once and its reverse occurs once.
  std::map<std::pair<int, int>, std::pair<int, int>> directed;
  for (int t = 0; t < static_cast<int>(triangles_.size()); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      if (tri[k] < 0 || tri[k] >= nv) throw ValidationError("mesh triangle references a missing vertex");
      const int a = tri[k];
      const int b = tri[(k + 1) % 3];
      if (a == b) throw ValidationError("mesh has a degenerate triangle " + std::to_string(t));
      if (!directed.emplace(std::make_pair(a, b), std::make_pair(t, k)).second)
        throw ValidationError("mesh is not consistently oriented (edge " + std::to_string(a) + "-" +
                              std::to_string(b) + " repeated)");
    }
  }

  face_normals_.resize(triangles_.size());
  double volume6 = 0.0;
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    const Vec3& a = vertices_[tri[0]];
    const Vec3& b = vertices_[tri[1]];
    const Vec3& c = vertices_[tri[2]];
    const Vec3 n = (b - a).cross(c - a);
    if (0.5 * n.norm() <= kMinTriangleArea)
      throw ValidationError("mesh has a degenerate triangle " + std::to_string(t));
    face_normals_[t] = n.normalized();
    volume6 += a.dot(b.cross(c));
  }
  if (volume6 <= 0.0) throw ValidationError("mesh is oriented inward (non-positive enclosed volume)");

  edge_normals_.resize(triangles_.size());
  for (const auto& [edge, owner] : directed) {
    auto twin = directed.find({edge.second, edge.first});
    if (twin == directed.end())
      throw ValidationError("mesh is not watertight (open edge " + std::to_string(edge.first) + "-" +
                            std::to_string(edge.second) + ")");
    edge_normals_[owner.first][owner.second] = face_normals_[owner.first] + face_normals_[twin->second.first];
  }

  vertex_normals_.assign(vertices_.size(), Vec3::Zero());
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const Vec3& at = vertices_[tri[k]];
      const double angle = corner_angle(at, vertices_[tri[(k + 1) % 3]], vertices_[tri[(k + 2) % 3]]);
      vertex_normals_[tri[k]] += angle * face_normals_[t];
    }
  }

  order_.resize(triangles_.size());
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * triangles_.size() / kLeafSize + 2);
  build(0, static_cast<int>(triangles_.size()));
}

int TriMeshObject::build(int first, int count) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d box;
  Eigen::AlignedBox3d centroid_box;
  for (int i = first; i < first + count; ++i) {
    const auto& tri = triangles_[order_[i]];
    Vec3 centroid = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
      box.extend(vertices_[tri[k]]);
      centroid += vertices_[tri[k]] / 3.0;
    }
    centroid_box.extend(centroid);
  }
  nodes_[index].box = box;
  if (count <= kLeafSize) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }
  int axis = 0;
  centroid_box.sizes().maxCoeff(&axis);
  auto centroid_on = [&](int t) {
    const auto& tri = triangles_[t];
    return vertices_[tri[0]][axis] + vertices_[tri[1]][axis] + vertices_[tri[2]][axis];
  };
  const int mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                   [&](int a, int b) { return centroid_on(a) < centroid_on(b) || (centroid_on(a) == centroid_on(b) && a < b); });
  const int left = build(first, mid - first);
  const int right = build(mid, first + count - mid);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

SurfaceQuery TriMeshObject::query(const Vec3& p) const {
  double best_sq = std::numeric_limits<double>::infinity();
  int best_tri = -1;
  TriangleHit best_hit{Vec3::Zero(), Region::Face};

  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (box_squared_distance(node.box, p) > best_sq) continue;
    if (node.left < 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const int t = order_[i];
        const auto& tri = triangles_[t];
        const TriangleHit hit = closest_on_triangle(p, vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
        const double sq = (p - hit.point).squaredNorm();
        if (sq < best_sq || (sq == best_sq && t < best_tri)) {
          best_sq = sq;
          best_tri = t;
          best_hit = hit;
        }
      }
      continue;
    }
    const double dl = box_squared_distance(nodes_[node.left].box, p);
    const double dr = box_squared_distance(nodes_[node.right].box, p);
    // Push the farther child first so the nearer one is searched first.
    if (dl <= dr) {
      stack[top++] = node.right;
      stack[top++] = node.left;
    } else {
      stack[top++] = node.left;
      stack[top++] = node.right;
    }
  }

  const auto& tri = triangles_[best_tri];
  SurfaceQuery out;
  out.closest = best_hit.point;
  out.triangle = best_tri;
  Vec3 pseudo;
  switch (best_hit.region) {
    case Region::Face:
      out.feature = SurfaceFeature::Face;
      pseudo = face_normals_[best_tri];
      break;
    case Region::VertexA:
    case Region::VertexB:
    case Region::VertexC: {
      out.feature = SurfaceFeature::Vertex;
      const int k = best_hit.region == Region::VertexA ? 0 : best_hit.region == Region::VertexB ? 1 : 2;
      pseudo = vertex_normals_[tri[k]];
      break;
    }
    case Region::EdgeAB:
    case Region::EdgeBC:
    case Region::EdgeCA: {
      out.feature = SurfaceFeature::Edge;
      const int k = best_hit.region == Region::EdgeAB ? 0 : best_hit.region == Region::EdgeBC ? 1 : 2;
      pseudo = edge_normals_[best_tri][k];
      out.edge_direction = (vertices_[tri[(k + 1) % 3]] - vertices_[tri[k]]).normalized();
      break;
    }
  }

  const Vec3 diff = p - out.closest;
  const double dist = std::sqrt(best_sq);
  const double sign = diff.dot(pseudo) >= 0.0 ? 1.0 : -1.0;
  out.distance = sign * dist;
  if (out.feature == SurfaceFeature::Face) {
    out.gradient = face_normals_[best_tri];
  } else if (dist > 1e-14) {
    out.gradient = sign * diff / dist;
  } else {
    out.gradient = pseudo.normalized();
  }
  return out;
}

SurfaceDerivatives TriMeshObject::derivatives(const SurfaceQuery& q, const Vec3& /*p*/) {
  SurfaceDerivatives out{Mat3::Zero(), Mat3::Zero()};
  const Mat3 eye = Mat3::Identity();
  const Vec3& g = q.gradient;
  switch (q.feature) {
    case SurfaceFeature::Face:
      out.closest = eye - g * g.transpose();
      break;
    case SurfaceFeature::Edge: {
      const Vec3& t = q.edge_direction;
      out.closest = t * t.transpose();
      if (std::abs(q.distance) > 1e-14)
        out.gradient = (eye - g * g.transpose() - t * t.transpose()) / q.distance;
      break;
    }
    case SurfaceFeature::Vertex:
      if (std::abs(q.distance) > 1e-14) out.gradient = (eye - g * g.transpose()) / q.distance;
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// OBJ

TriMeshObject parse_obj(std::string_view text) {
  std::vector<Vec3> verts;
  std::vector<TriMeshObject::Triangle> tris;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    const std::string where = "OBJ line " + std::to_string(line_no);
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x() >> v.y() >> v.z())) throw ParseError(where + ": malformed vertex");
      verts.push_back(v);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string tok;
      while (ls >> tok) {
        const std::string head = tok.substr(0, tok.find('/'));
        int idx = 0;
        auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
        if (ec != std::errc() || ptr != head.data() + head.size())
          throw ParseError(where + ": malformed face index '" + tok + "'");
        if (idx <= 0) throw ParseError(where + ": negative or zero face index '" + tok + "' is not supported");
        if (idx > static_cast<int>(verts.size())) throw ParseError(where + ": face index out of range");
        poly.push_back(idx - 1);
      }
      if (poly.size() < 3) throw ParseError(where + ": face needs at least 3 vertices");
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) tris.push_back({poly[0], poly[k], poly[k + 1]});
    }
    // Other records (vn, vt, usemtl, mtllib, o, g, s, ...) are ignored.
  }
  return TriMeshObject(std::move(verts), std::move(tris));
}

TriMeshObject load_obj(const std::filesystem::path& path) { return parse_obj(detail::read_text_file(path)); }

std::string write_obj(const TriMeshObject& mesh) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& v : mesh.vertices()) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles()) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  return out.str();
}

TriMeshObject make_box(const Vec3& size) {
  std::vector<Vec3> verts;
  for (int i = 0; i < 8; ++i)
    verts.emplace_back((i & 1 ? 0.5 : -0.5) * size.x(), (i & 2 ? 0.5 : -0.5) * size.y(),
                       (i & 4 ? 0.5 : -0.5) * size.z());
  // Each face as a quad split 0-1-2 / 0-2-3, then oriented outward.
  const int quads[6][4] = {{0, 2, 6, 4}, {1, 5, 7, 3}, {0, 4, 5, 1}, {2, 3, 7, 6}, {0, 1, 3, 2}, {4, 6, 7, 5}};
  std::vector<TriMeshObject::Triangle> tris;
  for (const auto& q : quads) {
    tris.push_back({q[0], q[1], q[2]});
    tris.push_back({q[0], q[2], q[3]});
  }
  orient_outward_convex(verts, tris);
  return TriMeshObject(std::move(verts), std::move(tris));
}

TriMeshObject make_icosphere(double radius, int subdivisions) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> verts = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                             {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<TriMeshObject::Triangle> tris = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
      {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back((verts[a] + verts[b]).normalized());
      const int idx = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<TriMeshObject::Triangle> next;
    next.reserve(tris.size() * 4);
    for (const auto& tri : tris) {
      const int a = mid(tri[0], tri[1]);
      const int b = mid(tri[1], tri[2]);
      const int c = mid(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    tris = std::move(next);
  }
  for (auto& v : verts) v *= radius;
  orient_outward_convex(verts, tris);
  return TriMeshObject(std::move(verts), std::move(tris));
}

}  // namespace fungrasp
