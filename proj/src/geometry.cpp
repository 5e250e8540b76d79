#include "glcorner/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "delaunay.hpp"
#include "glcorner/error.hpp"

namespace glc {

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double L2 = dot(ab, ab);
  double t = L2 > 0 ? dot(p - a, ab) / L2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

const char* to_string(BoundaryTag tag) {
  return tag == BoundaryTag::kPhysical ? "PHYSICAL" : "ARTIFICIAL";
}

void SectorDomain::validate() const {
  require(std::isfinite(alpha) && alpha > 0 && alpha <= 2 * M_PI + 1e-12,
          ErrorKind::kInvalidParameter, "sector angle must lie in (0, 2pi]");
  require(std::isfinite(radius) && radius > 0, ErrorKind::kInvalidParameter,
          "sector radius must be positive");
  require(grading > 0 && grading <= 1, ErrorKind::kInvalidParameter,
          "sector grading must lie in (0, 1]");
}

// ---- PolygonDomain ---------------------------------------------------------

namespace {

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto o = [](Vec2 p, Vec2 q, Vec2 r) { return cross(q - p, r - p); };
  auto on = [](Vec2 p, Vec2 q, Vec2 r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
           std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
  };
  const double d1 = o(c, d, a), d2 = o(c, d, b), d3 = o(a, b, c), d4 = o(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on(c, d, a)) return true;
  if (d2 == 0 && on(c, d, b)) return true;
  if (d3 == 0 && on(a, b, c)) return true;
  if (d4 == 0 && on(a, b, d)) return true;
  return false;
}

double signed_area(const std::vector<Vec2>& v) {
  double s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) s += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * s;
}

}  // namespace

PolygonDomain PolygonDomain::create(std::vector<Vec2> vertices) {
  const std::size_t n = vertices.size();
  require(n >= 3, ErrorKind::kInvalidGeometry, "polygon needs at least 3 vertices");
  double scale = 0;
  for (const Vec2& v : vertices) {
    require(std::isfinite(v.x) && std::isfinite(v.y), ErrorKind::kInvalidGeometry,
            "non-finite vertex");
    scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      require(norm(vertices[i] - vertices[j]) > 1e-12 * scale, ErrorKind::kInvalidGeometry,
              "repeated vertex");
    }
  }
  const double A = signed_area(vertices);
  require(std::abs(A) > 1e-14 * scale * scale, ErrorKind::kInvalidGeometry,
          "polygon has zero area");
  if (A < 0) std::reverse(vertices.begin(), vertices.end());
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices[(i + n - 1) % n], b = vertices[i], c = vertices[(i + 1) % n];
    const double c2 = cross(b - a, c - b);
    require(std::abs(c2) > 1e-10 * norm(b - a) * norm(c - b), ErrorKind::kInvalidGeometry,
            "three consecutive vertices are collinear");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      require(!segments_intersect(vertices[i], vertices[(i + 1) % n], vertices[j],
                                  vertices[(j + 1) % n]),
              ErrorKind::kInvalidGeometry, "polygon boundary self-intersects");
    }
  }
  PolygonDomain p;
  p.vertices_ = std::move(vertices);
  p.angles_.resize(n);
  bool convex_angles = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 v = p.vertices_[i];
    const Vec2 next = p.vertices_[(i + 1) % n] - v;
    const Vec2 prev = p.vertices_[(i + n - 1) % n] - v;
    double a = std::atan2(cross(next, prev), dot(next, prev));
    if (a < 0) a += 2 * M_PI;
    p.angles_[i] = a;
    if (!(a > 0 && a < M_PI)) convex_angles = false;
  }
  p.assumption_flag_ = convex_angles;
  return p;
}

double PolygonDomain::area() const { return signed_area(vertices_); }

double PolygonDomain::perimeter() const {
  double s = 0;
  for (std::size_t i = 0; i < size(); ++i) s += norm(vertices_[(i + 1) % size()] - vertices_[i]);
  return s;
}

double PolygonDomain::diameter() const {
  double d = 0;
  for (const Vec2& a : vertices_)
    for (const Vec2& b : vertices_) d = std::max(d, norm(a - b));
  return d;
}

Vec2 PolygonDomain::centroid() const {
  Vec2 c;
  double A = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    const Vec2 a = vertices_[i], b = vertices_[(i + 1) % size()];
    const double w = cross(a, b);
    A += w;
    c += w * (a + b);
  }
  return (1.0 / (3.0 * A)) * c;
}

bool PolygonDomain::contains(Vec2 p) const {
  bool in = false;
  const std::size_t n = size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = vertices_[i], b = vertices_[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) in = !in;
    }
  }
  return in;
}

double PolygonDomain::boundary_distance(Vec2 p) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i)
    d = std::min(d, segment_distance(p, vertices_[i], vertices_[(i + 1) % size()]));
  return d;
}

PolygonDomain PolygonDomain::unit_square() {
  return create({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

PolygonDomain PolygonDomain::regular(int n, double side) {
  require(n >= 3 && side > 0, ErrorKind::kInvalidParameter, "bad regular polygon");
  const double R = side / (2.0 * std::sin(M_PI / n));
  std::vector<Vec2> v;
  for (int k = 0; k < n; ++k) {
    const double t = -M_PI / 2 + M_PI / n + 2 * M_PI * k / n;
    v.push_back({R * std::cos(t), R * std::sin(t)});
  }
  return create(v);
}

// ---- Mesh ------------------------------------------------------------------

double Mesh::triangle_area(std::size_t t) const {
  const auto& T = triangles[t];
  return 0.5 * cross(nodes[T[1]] - nodes[T[0]], nodes[T[2]] - nodes[T[0]]);
}

double Mesh::area() const {
  double s = 0;
  for (std::size_t t = 0; t < triangles.size(); ++t) s += triangle_area(t);
  return s;
}

namespace {

double min_angle_of(Vec2 a, Vec2 b, Vec2 c) {
  auto ang = [](Vec2 p, Vec2 q, Vec2 r) {
    const Vec2 u = q - p, v = r - p;
    return std::atan2(std::abs(cross(u, v)), dot(u, v));
  };
  return std::min({ang(a, b, c), ang(b, c, a), ang(c, a, b)});
}

}  // namespace

double Mesh::min_angle_deg() const {
  double m = 180.0;
  for (const auto& T : triangles)
    m = std::min(m, min_angle_of(nodes[T[0]], nodes[T[1]], nodes[T[2]]) * 180.0 / M_PI);
  return m;
}

double Mesh::max_edge() const {
  double m = 0;
  for (const auto& T : triangles)
    for (int i = 0; i < 3; ++i) m = std::max(m, norm(nodes[T[(i + 1) % 3]] - nodes[T[i]]));
  return m;
}

std::vector<char> Mesh::nodes_with_tag(BoundaryTag tag) const {
  std::vector<char> out(nodes.size(), 0);
  for (const auto& e : boundary_edges) {
    if (e.tag != tag) continue;
    out[e.a] = 1;
    out[e.b] = 1;
  }
  return out;
}

std::uint64_t Mesh::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (const Vec2& p : nodes) {
    mix(&p.x, sizeof(double));
    mix(&p.y, sizeof(double));
  }
  for (const auto& T : triangles) mix(T.data(), sizeof(int) * 3);
  return h;
}

void Mesh::check_consistency() const {
  const int n = static_cast<int>(nodes.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int k : triangles[t])
      require(k >= 0 && k < n, ErrorKind::kInvalidParameter, "triangle index out of range");
    require(triangle_area(t) > 0, ErrorKind::kInvalidParameter, "inverted triangle");
  }
  for (const auto& e : boundary_edges)
    require(e.a >= 0 && e.a < n && e.b >= 0 && e.b < n, ErrorKind::kInvalidParameter,
            "boundary edge index out of range");
}

// ---- sizing -----------------------------------------------------------------

double GradedSizing::operator()(Vec2 x) const {
  double dc = std::numeric_limits<double>::infinity();
  for (const Vec2& c : corners) dc = std::min(dc, norm(x - c));
  double s = std::min(h_max, h_corner + corner_slope * dc);
  if (!edges.empty()) {
    double de = std::numeric_limits<double>::infinity();
    for (const auto& e : edges) de = std::min(de, segment_distance(x, e.a, e.b));
    const double excess = std::max({0.0, de - layer_width, dc - zone_radius});
    s = std::min(s, h_layer + growth * excess);
  }
  return std::max(s, h_corner);
}

// ---- meshers ---------------------------------------------------------------

namespace {

struct SegmentInfo {
  BoundaryTag tag;
  int side;
};

Mesh build_mesh(const detail::RefinedMesh& r, const std::vector<SegmentInfo>& info,
                const std::vector<OutlineSegment>& outline) {
  Mesh m;
  m.nodes = r.nodes;
  m.triangles = r.triangles;
  for (const auto& e : r.segment_edges) {
    if (info[e.segment].side < 0) continue;  // interior constraint
    m.boundary_edges.push_back({e.a, e.b, info[e.segment].tag, info[e.segment].side});
  }
  m.outline = outline;
  return m;
}

// Worst angle over triangles outside the exempt zones. Near an acute input
// corner (angle below 60 deg) the floor cannot hold: the corner triangles carry
// the input angle and the concentric-shell splits leave a few skinny
// triangles nearby. The zone radius is six corner-element lengths.
double checked_min_angle(const Mesh& m, const std::vector<int>& acute_nodes) {
  std::vector<std::pair<Vec2, double>> zones;
  for (int c : acute_nodes) {
    double l = 0;
    for (const auto& T : m.triangles) {
      for (int k = 0; k < 3; ++k) {
        if (T[k] != c) continue;
        l = std::max({l, norm(m.nodes[T[(k + 1) % 3]] - m.nodes[c]),
                      norm(m.nodes[T[(k + 2) % 3]] - m.nodes[c])});
      }
    }
    zones.emplace_back(m.nodes[c], 6.0 * l);
  }
  double worst = 180.0;
  for (const auto& T : m.triangles) {
    bool exempt = false;
    for (const auto& [c, r] : zones)
      for (int k = 0; k < 3; ++k) exempt = exempt || norm(m.nodes[T[k]] - c) <= r;
    if (exempt) continue;
    worst = std::min(worst, min_angle_of(m.nodes[T[0]], m.nodes[T[1]], m.nodes[T[2]]) * 180 / M_PI);
  }
  return worst;
}

void enforce_floor(const Mesh& m, const std::vector<int>& acute_nodes, double floor_deg) {
  const double worst = checked_min_angle(m, acute_nodes);
  if (worst < floor_deg - 1e-9) {
    std::ostringstream os;
    os << "minimum angle " << worst << " deg below quality floor " << floor_deg;
    throw Error(ErrorKind::kMeshingFailure, os.str());
  }
}

double arc_size(const SizingFunction& size, double R, double alpha) {
  double s = std::numeric_limits<double>::infinity();
  const int samples = 64;
  for (int k = 0; k <= samples; ++k) {
    const double t = -alpha / 2 + alpha * k / samples;
    s = std::min(s, size({R * std::cos(t), R * std::sin(t)}));
  }
  return s;
}

}  // namespace

Mesh make_sector_mesh(const SectorDomain& sector, double h, const SectorMeshOptions& options) {
  sector.validate();
  require(std::isfinite(h) && h > 0 && h < sector.radius, ErrorKind::kInvalidParameter,
          "mesh size must satisfy 0 < h < radius");
  const double alpha = sector.alpha, R = sector.radius;
  const Vec2 lower{R * std::cos(-alpha / 2), R * std::sin(-alpha / 2)};
  const Vec2 upper{R * std::cos(alpha / 2), R * std::sin(alpha / 2)};

  SizingFunction size = options.sizing;
  if (!size) {
    GradedSizing g;
    g.corners = {{0, 0}};
    g.h_corner = h * sector.grading;
    g.corner_slope = options.corner_slope;
    g.h_max = std::min(h, options.h_max);
    if (std::isfinite(options.edge_layer)) {
      g.edges = {{{0, 0}, lower, BoundaryTag::kPhysical, 0},
                 {{0, 0}, upper, BoundaryTag::kPhysical, 1}};
      g.h_layer = h;
      g.layer_width = options.edge_layer;
      g.growth = options.growth;
      g.h_max = options.h_max;
    }
    size = g;
  }

  if (alpha >= 2 * M_PI - 1e-12) {
    Mesh m = make_sector_mesh_polar(sector, [size](Vec2 x) { return size(x); });
    m.h = h;
    return m;
  }

  detail::Pslg pslg;
  pslg.points.push_back({0, 0});
  const double s_arc = arc_size(size, R, alpha);
  const int n_arc = std::max(2, static_cast<int>(std::ceil(alpha * R / (0.4 * s_arc))));
  for (int k = 0; k <= n_arc; ++k) {
    const double t = -alpha / 2 + alpha * k / n_arc;
    pslg.points.push_back({R * std::cos(t), R * std::sin(t)});
  }
  pslg.points[1] = lower;
  pslg.points[n_arc + 1] = upper;
  std::vector<SegmentInfo> info;
  std::vector<OutlineSegment> outline;

  // Interior arcs: constrained chords from edge to edge, splitting the edges.
  std::vector<double> arcs;
  for (double r : options.interior_arcs) {
    require(r > 0 && r < R, ErrorKind::kInvalidParameter, "interior arc radius must lie in (0, R)");
    arcs.push_back(r);
  }
  std::sort(arcs.begin(), arcs.end());
  std::vector<int> lower_chain{0}, upper_chain{0};
  for (double r : arcs) {
    const int n = std::max(2, static_cast<int>(std::ceil(alpha * r / (0.4 * arc_size(size, r, alpha)))));
    const int first = static_cast<int>(pslg.points.size());
    for (int k = 0; k <= n; ++k) {
      const double t = -alpha / 2 + alpha * k / n;
      pslg.points.push_back({r * std::cos(t), r * std::sin(t)});
    }
    for (int k = 0; k < n; ++k) {
      pslg.segments.push_back({first + k, first + k + 1});
      info.push_back({BoundaryTag::kPhysical, -1});
    }
    lower_chain.push_back(first);
    upper_chain.push_back(first + n);
  }
  lower_chain.push_back(1);
  upper_chain.push_back(n_arc + 1);

  for (std::size_t k = 0; k + 1 < lower_chain.size(); ++k) {
    pslg.segments.push_back({lower_chain[k], lower_chain[k + 1]});
    info.push_back({BoundaryTag::kPhysical, 0});
  }
  outline.push_back({{0, 0}, lower, BoundaryTag::kPhysical, 0});
  for (int k = 1; k <= n_arc; ++k) {
    pslg.segments.push_back({k, k + 1});
    info.push_back({BoundaryTag::kArtificial, 2});
    outline.push_back({pslg.points[k], pslg.points[k + 1], BoundaryTag::kArtificial, 2});
  }
  for (std::size_t k = upper_chain.size() - 1; k > 0; --k) {
    pslg.segments.push_back({upper_chain[k], upper_chain[k - 1]});
    info.push_back({BoundaryTag::kPhysical, 1});
  }
  outline.push_back({upper, {0, 0}, BoundaryTag::kPhysical, 1});

  detail::RefineOptions ro;
  ro.size = size;
  ro.min_angle_deg = options.quality_floor_deg + 0.7;
  const auto r = detail::refine_pslg(pslg, ro);
  Mesh m = build_mesh(r, info, outline);
  m.corner_nodes[0] = r.input_to_node[0];
  m.h = h;
  std::vector<int> acute;
  if (alpha < M_PI / 3 + 1e-9) acute.push_back(r.input_to_node[0]);
  enforce_floor(m, acute, options.quality_floor_deg);
  return m;
}

Mesh make_sector_mesh_polar(const SectorDomain& sector, const SizingFunction& radial_size) {
  sector.validate();
  const double alpha = sector.alpha, R = sector.radius;
  // Rings and arc spacing of s / sqrt 2 keep the longest (diagonal) edge at s.
  auto s_at = [&](double r) { return radial_size({r, 0.0}) / std::sqrt(2.0); };
  std::vector<double> radii{0.0};
  while (radii.back() < R) {
    const double r = radii.back();
    double s = s_at(r);
    s = s_at(r + 0.5 * s);
    radii.push_back(r + s);
  }
  // Snap the last ring onto R, merging a sliver ring if needed.
  if (radii.size() > 2 && R - radii[radii.size() - 2] < 0.5 * s_at(R)) radii.pop_back();
  const double scale = R / radii.back();
  for (double& r : radii) r *= scale;
  radii.back() = R;

  Mesh m;
  std::vector<std::vector<int>> ring;
  ring.push_back({0});
  m.nodes.push_back({0, 0});
  for (std::size_t k = 1; k < radii.size(); ++k) {
    const double r = radii[k];
    const int segs = std::max(1, static_cast<int>(std::ceil(alpha * r / s_at(r))));
    std::vector<int> ids;
    for (int j = 0; j <= segs; ++j) {
      const double t = -alpha / 2 + alpha * j / segs;
      ids.push_back(static_cast<int>(m.nodes.size()));
      m.nodes.push_back({r * std::cos(t), r * std::sin(t)});
    }
    ring.push_back(std::move(ids));
  }
  const std::size_t K = ring.size();
  for (std::size_t k = 0; k + 1 < K; ++k) {
    const auto& in = ring[k];
    const auto& out = ring[k + 1];
    const int ni = static_cast<int>(in.size()) - 1, no = static_cast<int>(out.size()) - 1;
    if (ni == 0) {
      for (int j = 0; j < no; ++j) m.triangles.push_back({in[0], out[j], out[j + 1]});
    } else {
      int i = 0, j = 0;
      while (i < ni || j < no) {
        const double ti = static_cast<double>(i + 1) / ni;
        const double tj = static_cast<double>(j + 1) / no;
        if (j == no || (i < ni && ti < tj)) {
          m.triangles.push_back({in[i], out[j], in[i + 1]});
          ++i;
        } else {
          m.triangles.push_back({in[i], out[j], out[j + 1]});
          ++j;
        }
      }
    }
    m.boundary_edges.push_back({in.front(), out.front(), BoundaryTag::kPhysical, 0});
    m.boundary_edges.push_back({out.back(), in.back(), BoundaryTag::kPhysical, 1});
  }
  const auto& last = ring.back();
  for (std::size_t j = 0; j + 1 < last.size(); ++j)
    m.boundary_edges.push_back({last[j], last[j + 1], BoundaryTag::kArtificial, 2});
  const Vec2 lower = m.nodes[last.front()], upper = m.nodes[last.back()];
  m.outline.push_back({{0, 0}, lower, BoundaryTag::kPhysical, 0});
  for (std::size_t j = 0; j + 1 < last.size(); ++j)
    m.outline.push_back({m.nodes[last[j]], m.nodes[last[j + 1]], BoundaryTag::kArtificial, 2});
  m.outline.push_back({upper, {0, 0}, BoundaryTag::kPhysical, 1});
  m.corner_nodes[0] = 0;
  m.h = radii.size() > 1 ? s_at(R) : R;
  return m;
}

Mesh make_polygon_mesh(const PolygonDomain& poly, double h, double grading,
                       const PolygonMeshOptions& options) {
  require(std::isfinite(h) && h > 0, ErrorKind::kInvalidParameter, "mesh size must be positive");
  require(grading > 0 && grading <= 1, ErrorKind::kInvalidParameter, "grading must lie in (0, 1]");
  require(poly.size() >= 3, ErrorKind::kInvalidGeometry, "polygon not initialised");
  SizingFunction size = options.sizing;
  if (!size) {
    GradedSizing g;
    g.corners = poly.vertices();
    g.h_corner = h * grading;
    g.corner_slope = options.corner_slope;
    g.h_max = std::min(h, options.h_max);
    size = g;
  }
  const std::size_t n = poly.size();
  detail::Pslg pslg;
  pslg.points = poly.vertices();
  std::vector<SegmentInfo> info;
  std::vector<OutlineSegment> outline;
  for (std::size_t i = 0; i < n; ++i) {
    pslg.segments.push_back({static_cast<int>(i), static_cast<int>((i + 1) % n)});
    info.push_back({BoundaryTag::kPhysical, static_cast<int>(i)});
    outline.push_back({poly.vertices()[i], poly.vertices()[(i + 1) % n], BoundaryTag::kPhysical,
                       static_cast<int>(i)});
  }
  detail::RefineOptions ro;
  ro.size = size;
  ro.min_angle_deg = options.quality_floor_deg + 0.7;
  const auto r = detail::refine_pslg(pslg, ro);
  Mesh m = build_mesh(r, info, outline);
  std::vector<int> acute;
  for (std::size_t i = 0; i < n; ++i) {
    m.corner_nodes[static_cast<int>(i)] = r.input_to_node[i];
    if (poly.angles()[i] < M_PI / 3 + 1e-9) acute.push_back(r.input_to_node[i]);
  }
  m.h = h;
  enforce_floor(m, acute, options.quality_floor_deg);
  return m;
}

BoxMesh make_box_mesh(const PolygonDomain& poly, const SizingFunction& sizing, double box_factor,
                      double quality_floor_deg) {
  require(box_factor > 1, ErrorKind::kInvalidParameter, "box factor must exceed 1");
  const std::size_t n = poly.size();
  Vec2 lo = poly.vertices()[0], hi = lo;
  for (const Vec2& v : poly.vertices()) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  }
  const Vec2 c = 0.5 * (lo + hi);
  const double side = box_factor * poly.diameter();
  const double a = 0.5 * side;
  detail::Pslg pslg;
  pslg.points = poly.vertices();
  const Vec2 box[4] = {c + Vec2{-a, -a}, c + Vec2{a, -a}, c + Vec2{a, a}, c + Vec2{-a, a}};
  for (const Vec2& b : box) pslg.points.push_back(b);
  for (std::size_t i = 0; i < n; ++i)
    pslg.segments.push_back({static_cast<int>(i), static_cast<int>((i + 1) % n)});
  for (int k = 0; k < 4; ++k)
    pslg.segments.push_back({static_cast<int>(n) + k, static_cast<int>(n) + (k + 1) % 4});
  detail::RefineOptions ro;
  ro.size = sizing;
  ro.min_angle_deg = quality_floor_deg + 0.7;
  const auto r = detail::refine_pslg(pslg, ro);

  BoxMesh out;
  out.box_side = side;
  out.box.nodes = r.nodes;
  out.box.triangles = r.triangles;
  for (int k = 0; k < 4; ++k)
    out.box.outline.push_back({box[k], box[(k + 1) % 4], BoundaryTag::kArtificial, k});
  for (const auto& e : r.segment_edges) {
    if (e.segment >= static_cast<int>(n))
      out.box.boundary_edges.push_back(
          {e.a, e.b, BoundaryTag::kArtificial, e.segment - static_cast<int>(n)});
  }
  for (std::size_t i = 0; i < n; ++i) out.box.corner_nodes[static_cast<int>(i)] = r.input_to_node[i];

  // Domain sub-mesh.
  std::vector<int> to_domain(r.nodes.size(), -1);
  Mesh& d = out.domain;
  for (std::size_t t = 0; t < r.triangles.size(); ++t) {
    const auto& T = r.triangles[t];
    const Vec2 g = (1.0 / 3.0) * (r.nodes[T[0]] + r.nodes[T[1]] + r.nodes[T[2]]);
    if (!poly.contains(g)) continue;
    std::array<int, 3> D{};
    for (int k = 0; k < 3; ++k) {
      if (to_domain[T[k]] < 0) {
        to_domain[T[k]] = static_cast<int>(d.nodes.size());
        d.nodes.push_back(r.nodes[T[k]]);
        out.domain_to_box.push_back(T[k]);
      }
      D[k] = to_domain[T[k]];
    }
    d.triangles.push_back(D);
    out.domain_triangle_to_box.push_back(static_cast<int>(t));
  }
  // Polygon sides, oriented with the domain on the left.
  std::map<std::pair<int, int>, int> side_of;
  for (const auto& e : r.segment_edges) {
    if (e.segment < static_cast<int>(n)) {
      side_of[{std::min(e.a, e.b), std::max(e.a, e.b)}] = e.segment;
    }
  }
  for (const auto& D : d.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int p = out.domain_to_box[D[k]], q = out.domain_to_box[D[(k + 1) % 3]];
      auto it = side_of.find({std::min(p, q), std::max(p, q)});
      if (it != side_of.end())
        d.boundary_edges.push_back({D[k], D[(k + 1) % 3], BoundaryTag::kPhysical, it->second});
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    d.corner_nodes[static_cast<int>(i)] = to_domain[r.input_to_node[i]];
    d.outline.push_back({poly.vertices()[i], poly.vertices()[(i + 1) % n], BoundaryTag::kPhysical,
                         static_cast<int>(i)});
  }
  double hmax = 0;
  for (const Vec2& v : poly.vertices()) hmax = std::max(hmax, sizing(v));
  d.h = out.box.h = hmax;
  std::vector<int> acute;
  for (std::size_t i = 0; i < n; ++i)
    if (poly.angles()[i] < M_PI / 3 + 1e-9) acute.push_back(r.input_to_node[i]);
  enforce_floor(out.box, acute, quality_floor_deg);
  return out;
}

// ---- refinement and scaling ---------------------------------------------------

namespace {

Mesh refine_impl(const Mesh& mesh, std::map<std::pair<int, int>, int>* mids_out) {
  Mesh out;
  out.nodes = mesh.nodes;
  out.corner_nodes = mesh.corner_nodes;
  out.outline = mesh.outline;
  out.h = 0.5 * mesh.h;
  std::map<std::pair<int, int>, int> mids;
  auto mid = [&](int a, int b) {
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    auto it = mids.find(key);
    if (it != mids.end()) return it->second;
    const int id = static_cast<int>(out.nodes.size());
    out.nodes.push_back(0.5 * (mesh.nodes[a] + mesh.nodes[b]));
    mids.emplace(key, id);
    return id;
  };
  out.triangles.reserve(4 * mesh.triangles.size());
  for (const auto& T : mesh.triangles) {
    const int a = T[0], b = T[1], c = T[2];
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    out.triangles.push_back({a, ab, ca});
    out.triangles.push_back({ab, b, bc});
    out.triangles.push_back({ca, bc, c});
    out.triangles.push_back({ab, bc, ca});
  }
  for (const auto& e : mesh.boundary_edges) {
    const int m = mid(e.a, e.b);
    out.boundary_edges.push_back({e.a, m, e.tag, e.side});
    out.boundary_edges.push_back({m, e.b, e.tag, e.side});
  }
  if (mids_out) *mids_out = std::move(mids);
  return out;
}

}  // namespace

Mesh refine_uniform(const Mesh& mesh) { return refine_impl(mesh, nullptr); }

BoxMesh refine_uniform(const BoxMesh& mesh) {
  BoxMesh out;
  out.box_side = mesh.box_side;
  std::map<std::pair<int, int>, int> box_mids, dom_mids;
  out.box = refine_impl(mesh.box, &box_mids);
  out.domain = refine_impl(mesh.domain, &dom_mids);
  out.domain_to_box.assign(out.domain.nodes.size(), -1);
  for (std::size_t i = 0; i < mesh.domain_to_box.size(); ++i)
    out.domain_to_box[i] = mesh.domain_to_box[i];
  for (const auto& [key, id] : dom_mids) {
    const int p = mesh.domain_to_box[key.first], q = mesh.domain_to_box[key.second];
    out.domain_to_box[id] = box_mids.at({std::min(p, q), std::max(p, q)});
  }
  for (int t : mesh.domain_triangle_to_box)
    for (int k = 0; k < 4; ++k) out.domain_triangle_to_box.push_back(4 * t + k);
  return out;
}

Mesh scale_mesh(const Mesh& mesh, double s) {
  require(s > 0, ErrorKind::kInvalidParameter, "scale factor must be positive");
  Mesh out = mesh;
  for (Vec2& p : out.nodes) p = s * p;
  for (auto& o : out.outline) {
    o.a = s * o.a;
    o.b = s * o.b;
  }
  out.h = s * mesh.h;
  return out;
}

// ---- distances ---------------------------------------------------------------

double point_distance(const Mesh& mesh, const DistanceTargets& targets, Vec2 p) {
  double d = std::numeric_limits<double>::infinity();
  switch (targets.kind) {
    case DistanceTargets::Kind::kCorners:
      for (int id : targets.corner_ids) {
        auto it = mesh.corner_nodes.find(id);
        require(it != mesh.corner_nodes.end(), ErrorKind::kInvalidParameter, "unknown corner id");
        d = std::min(d, norm(p - mesh.nodes[it->second]));
      }
      break;
    case DistanceTargets::Kind::kBoundary:
    case DistanceTargets::Kind::kPhysicalBoundary:
      for (const auto& o : mesh.outline) {
        if (targets.kind == DistanceTargets::Kind::kPhysicalBoundary &&
            o.tag != BoundaryTag::kPhysical)
          continue;
        d = std::min(d, segment_distance(p, o.a, o.b));
      }
      break;
  }
  return d;
}

std::vector<double> distance_field(const Mesh& mesh, const DistanceTargets& targets) {
  if (targets.kind == DistanceTargets::Kind::kCorners) {
    require(!targets.corner_ids.empty(), ErrorKind::kInvalidParameter, "empty corner target set");
  } else {
    bool any = false;
    for (const auto& o : mesh.outline)
      any = any || targets.kind == DistanceTargets::Kind::kBoundary ||
            o.tag == BoundaryTag::kPhysical;
    require(any, ErrorKind::kInvalidParameter, "empty boundary target set");
  }
  std::vector<double> d(mesh.nodes.size());
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) d[i] = point_distance(mesh, targets, mesh.nodes[i]);
  return d;
}

// ---- serialization ---------------------------------------------------------------

void write_mesh_text(const Mesh& mesh, std::ostream& out) {
  const auto old = out.precision(17);
  out << "glcorner-mesh 1\n";
  out << "h " << mesh.h << "\n";
  out << "nodes " << mesh.nodes.size() << "\n";
  for (const Vec2& p : mesh.nodes) out << p.x << ' ' << p.y << "\n";
  out << "triangles " << mesh.triangles.size() << "\n";
  for (const auto& T : mesh.triangles) out << T[0] << ' ' << T[1] << ' ' << T[2] << "\n";
  out << "boundary_edges " << mesh.boundary_edges.size() << "\n";
  for (const auto& e : mesh.boundary_edges)
    out << e.a << ' ' << e.b << ' ' << to_string(e.tag) << ' ' << e.side << "\n";
  out << "corners " << mesh.corner_nodes.size() << "\n";
  for (const auto& [id, node] : mesh.corner_nodes) out << id << ' ' << node << "\n";
  out << "outline " << mesh.outline.size() << "\n";
  for (const auto& o : mesh.outline)
    out << o.a.x << ' ' << o.a.y << ' ' << o.b.x << ' ' << o.b.y << ' ' << to_string(o.tag) << ' '
        << o.side << "\n";
  out.precision(old);
}

namespace {

BoundaryTag parse_tag(const std::string& s) {
  if (s == "PHYSICAL") return BoundaryTag::kPhysical;
  if (s == "ARTIFICIAL") return BoundaryTag::kArtificial;
  throw Error(ErrorKind::kInvalidParameter, "unknown boundary tag " + s);
}

void expect(std::istream& in, const char* word) {
  std::string w;
  in >> w;
  require(static_cast<bool>(in) && w == word, ErrorKind::kInvalidParameter,
          std::string("mesh file: expected '") + word + "'");
}

}  // namespace

Mesh read_mesh_text(std::istream& in) {
  Mesh m;
  expect(in, "glcorner-mesh");
  int version = 0;
  in >> version;
  require(version == 1, ErrorKind::kInvalidParameter, "unsupported mesh version");
  expect(in, "h");
  in >> m.h;
  std::size_t n = 0;
  expect(in, "nodes");
  in >> n;
  m.nodes.resize(n);
  for (auto& p : m.nodes) in >> p.x >> p.y;
  expect(in, "triangles");
  in >> n;
  m.triangles.resize(n);
  for (auto& T : m.triangles) in >> T[0] >> T[1] >> T[2];
  expect(in, "boundary_edges");
  in >> n;
  for (std::size_t i = 0; i < n; ++i) {
    BoundaryEdge e;
    std::string tag;
    in >> e.a >> e.b >> tag >> e.side;
    e.tag = parse_tag(tag);
    m.boundary_edges.push_back(e);
  }
  expect(in, "corners");
  in >> n;
  for (std::size_t i = 0; i < n; ++i) {
    int id, node;
    in >> id >> node;
    m.corner_nodes[id] = node;
  }
  expect(in, "outline");
  in >> n;
  for (std::size_t i = 0; i < n; ++i) {
    OutlineSegment o;
    std::string tag;
    in >> o.a.x >> o.a.y >> o.b.x >> o.b.y >> tag >> o.side;
    o.tag = parse_tag(tag);
    m.outline.push_back(o);
  }
  require(static_cast<bool>(in), ErrorKind::kInvalidParameter, "truncated mesh file");
  m.check_consistency();
  return m;
}

std::string mesh_to_json(const Mesh& mesh) {
  nlohmann::json j;
  j["format"] = "glcorner-mesh";
  j["version"] = 1;
  j["h"] = mesh.h;
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (const Vec2& p : mesh.nodes) nodes.push_back({p.x, p.y});
  auto& tris = j["triangles"] = nlohmann::json::array();
  for (const auto& T : mesh.triangles) tris.push_back({T[0], T[1], T[2]});
  auto& edges = j["boundary_edges"] = nlohmann::json::array();
  for (const auto& e : mesh.boundary_edges)
    edges.push_back({{"a", e.a}, {"b", e.b}, {"tag", to_string(e.tag)}, {"side", e.side}});
  auto& corners = j["corners"] = nlohmann::json::object();
  for (const auto& [id, node] : mesh.corner_nodes) corners[std::to_string(id)] = node;
  return j.dump();
}

}  // namespace glc
