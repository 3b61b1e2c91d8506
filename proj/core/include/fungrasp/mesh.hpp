#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "fungrasp/pose.hpp"

namespace fungrasp {

enum class SurfaceFeature { Face, Edge, Vertex };

/// Result of a nearest-surface query.
struct SurfaceQuery {
  double distance = 0.0;  // signed, positive outside
  Vec3 closest = Vec3::Zero();
  Vec3 gradient = Vec3::Zero();  // unit outward direction, d(distance)/dp
  SurfaceFeature feature = SurfaceFeature::Face;
  int triangle = -1;
  Vec3 edge_direction = Vec3::Zero();  // Edge features only
};

/// Spatial derivatives of the closest point and of the gradient at a query point.
struct SurfaceDerivatives {
  Mat3 closest;
  Mat3 gradient;
};

/// Watertight, consistently (outward) oriented triangle mesh with an AABB tree.
///
/// Signs come from angle-weighted pseudo-normals of the nearest feature, so
/// distances are exact and continuous across faces, edges and vertices.
class TriMeshObject {
 public:
  using Triangle = std::array<int, 3>;

  /// Throws ValidationError unless every edge is shared by exactly two
  /// triangles with opposite winding, no triangle is degenerate, and the
  /// enclosed volume is positive.
  TriMeshObject(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

  std::span<const Vec3> vertices() const { return vertices_; }
  std::span<const Triangle> triangles() const { return triangles_; }
  const Vec3& face_normal(int triangle) const { return face_normals_[triangle]; }
  const Eigen::AlignedBox3d& bounds() const { return nodes_.front().box; }

  double signed_distance(const Vec3& p) const { return query(p).distance; }
  SurfaceQuery query(const Vec3& p) const;

  static SurfaceDerivatives derivatives(const SurfaceQuery& q, const Vec3& p);

 private:
  struct Node {
    Eigen::AlignedBox3d box;
    int left = -1;
    int right = -1;
    int first = 0;
    int count = 0;
  };

  int build(int first, int count);

  std::vector<Vec3> vertices_;
  std::vector<Triangle> triangles_;
  std::vector<Vec3> face_normals_;
  std::vector<std::array<Vec3, 3>> edge_normals_;  // per triangle local edge (v0v1, v1v2, v2v0)
  std::vector<Vec3> vertex_normals_;
  std::vector<int> order_;  // triangle indices permuted by the tree
  std::vector<Node> nodes_;
};

/// Wavefront OBJ subset: `v` and `f` records, polygons fan-triangulated
/// (quads split 0-1-2 / 0-2-3). Negative indices are rejected.
TriMeshObject parse_obj(std::string_view text);
TriMeshObject load_obj(const std::filesystem::path& path);
std::string write_obj(const TriMeshObject& mesh);

/// Axis-aligned box centered at the origin.
TriMeshObject make_box(const Vec3& size);
/// Subdivided icosahedron; 3 subdivisions give 642 vertices.
TriMeshObject make_icosphere(double radius, int subdivisions);

/// Horizontal table surface at world height `height`, normal +z.
struct TablePlane {
  double height = 0.0;
};

/// Signed height of p above the table.
inline double table_distance(const TablePlane& plane, const Vec3& p) { return p.z() - plane.height; }

}  // namespace fungrasp
