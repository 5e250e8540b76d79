#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace glc {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 rotate(Vec2 a, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

/// Distance from p to the closed segment [a, b].
double segment_distance(Vec2 p, Vec2 a, Vec2 b);

enum class BoundaryTag { kPhysical, kArtificial };

const char* to_string(BoundaryTag tag);

/// Truncated infinite sector {r(cos t, sin t) : 0 < r < radius, |t| < alpha/2}.
struct SectorDomain {
  double alpha = M_PI;
  double radius = 1.0;
  double grading = 0.1;

  void validate() const;
};

/// Simple straight-edge polygon, stored counter-clockwise.
class PolygonDomain {
 public:
  /// Validates and orients the vertex list. Clockwise input is reversed.
  /// Throws invalid-geometry for fewer than three vertices, collinear
  /// consecutive triples, repeated points or self-intersections.
  static PolygonDomain create(std::vector<Vec2> vertices);

  const std::vector<Vec2>& vertices() const { return vertices_; }
  /// Interior angle at each vertex, radians.
  const std::vector<double>& angles() const { return angles_; }
  std::size_t size() const { return vertices_.size(); }

  /// True iff every interior angle lies in (0, pi). The spectral half of the
  /// angle assumption is checked later against computed corner energies.
  bool assumption_flag() const { return assumption_flag_; }
  void set_assumption_flag(bool flag) { assumption_flag_ = flag; }

  double area() const;
  double perimeter() const;
  double diameter() const;
  Vec2 centroid() const;
  bool contains(Vec2 p) const;
  double boundary_distance(Vec2 p) const;

  static PolygonDomain unit_square();
  static PolygonDomain regular(int n, double side);

 private:
  std::vector<Vec2> vertices_;
  std::vector<double> angles_;
  bool assumption_flag_ = false;
};

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  BoundaryTag tag = BoundaryTag::kPhysical;
  int side = 0;  // index of the straight side (or arc) it lies on
};

struct OutlineSegment {
  Vec2 a;
  Vec2 b;
  BoundaryTag tag = BoundaryTag::kPhysical;
  int side = 0;
};

struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  std::map<int, int> corner_nodes;  // corner id -> node index
  double h = 0.0;
  /// Geometric boundary of the meshed domain, used for exact distances.
  std::vector<OutlineSegment> outline;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
  double triangle_area(std::size_t t) const;
  double area() const;
  double min_angle_deg() const;
  double max_edge() const;
  /// Nodes that lie on an edge carrying the given tag.
  std::vector<char> nodes_with_tag(BoundaryTag tag) const;
  /// Stable content hash, used as the mesh reference in serialized states.
  std::uint64_t fingerprint() const;
  /// Throws invalid-parameter when triangles are inverted or indices dangle.
  void check_consistency() const;
};

using SizingFunction = std::function<double(Vec2)>;

/// Sizing for corner-localized problems: fine at the corners, a resolved
/// layer along the boundary near the corners, linear growth elsewhere.
struct GradedSizing {
  std::vector<Vec2> corners;
  std::vector<OutlineSegment> edges;  // boundary pieces defining the layer
  double h_corner = 0.01;
  double corner_slope = 0.25;
  double h_layer = 0.05;
  double layer_width = std::numeric_limits<double>::infinity();
  double zone_radius = std::numeric_limits<double>::infinity();
  double growth = 0.3;
  double h_max = std::numeric_limits<double>::infinity();

  double operator()(Vec2 x) const;
};

struct SectorMeshOptions {
  /// Size of the layer along the straight edges where the size stays at h.
  double edge_layer = std::numeric_limits<double>::infinity();
  double corner_slope = 0.25;
  double growth = 0.3;
  double h_max = std::numeric_limits<double>::infinity();
  double quality_floor_deg = 20.0;
  /// Optional override of the sizing function.
  SizingFunction sizing;
  /// Radii of arcs inserted as interior constraints, so that truncations at
  /// these radii have an exact boundary inside the same mesh.
  std::vector<double> interior_arcs;
};

/// Graded Delaunay-refinement mesh of the truncated sector. The arc is
/// tagged ARTIFICIAL, the straight edges PHYSICAL. Element size at the vertex
/// is at most h * sector.grading. A full turn (alpha = 2 pi) is meshed with the
/// structured polar mesher, which keeps the two slit faces disconnected.
Mesh make_sector_mesh(const SectorDomain& sector, double h,
                      const SectorMeshOptions& options = {});

/// Structured polar mesher: rings spaced by the sizing function, each ring
/// split evenly in angle. Sizing is sampled along the bisector only.
Mesh make_sector_mesh_polar(const SectorDomain& sector,
                            const SizingFunction& radial_size);

struct PolygonMeshOptions {
  double quality_floor_deg = 20.0;
  double corner_slope = 0.25;
  double h_max = std::numeric_limits<double>::infinity();
  /// Optional override of the sizing function.
  SizingFunction sizing;
};

/// Graded Delaunay-refinement mesh of a straight-edge polygon, with nodes on
/// every vertex and grading toward all corners.
Mesh make_polygon_mesh(const PolygonDomain& poly, double h, double grading,
                       const PolygonMeshOptions& options = {});

/// A square box containing a polygon, meshed conformingly so that the
/// triangles inside the polygon form `domain`.
struct BoxMesh {
  Mesh box;
  Mesh domain;
  std::vector<int> domain_to_box;          // domain node -> box node
  std::vector<int> domain_triangle_to_box;  // domain triangle -> box triangle
  double box_side = 0.0;
};

BoxMesh make_box_mesh(const PolygonDomain& poly, const SizingFunction& sizing,
                      double box_factor = 3.0, double quality_floor_deg = 20.0);

/// Red (1:4) refinement: halves h, keeps corners and boundary tags.
Mesh refine_uniform(const Mesh& mesh);
BoxMesh refine_uniform(const BoxMesh& mesh);

/// Maps every node x to s * x.
Mesh scale_mesh(const Mesh& mesh, double s);

struct DistanceTargets {
  enum class Kind { kCorners, kBoundary, kPhysicalBoundary };
  Kind kind = Kind::kBoundary;
  std::vector<int> corner_ids;

  static DistanceTargets corners(std::vector<int> ids) {
    return {Kind::kCorners, std::move(ids)};
  }
  static DistanceTargets boundary() { return {Kind::kBoundary, {}}; }
  static DistanceTargets physical_boundary() {
    return {Kind::kPhysicalBoundary, {}};
  }
};

/// Exact Euclidean distance from every node to the target set.
std::vector<double> distance_field(const Mesh& mesh,
                                   const DistanceTargets& targets);

/// Distance from an arbitrary point to the same target set.
double point_distance(const Mesh& mesh, const DistanceTargets& targets,
                      Vec2 p);

// Plain-text and JSON mesh serialization.
void write_mesh_text(const Mesh& mesh, std::ostream& out);
Mesh read_mesh_text(std::istream& in);
std::string mesh_to_json(const Mesh& mesh);

}  // namespace glc
