#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "glcorner/error.hpp"
#include "glcorner/geometry.hpp"

using namespace glc;

namespace {

void expect_error(ErrorKind kind, const std::function<void()>& f) {
  try {
    f();
    FAIL() << "expected " << to_string(kind);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(Sector, HalfDiskArea) {
  const Mesh m = make_sector_mesh({M_PI, 1.0, 0.1}, 0.1);
  EXPECT_NEAR(m.area(), M_PI / 2, 1e-3);
  m.check_consistency();
  EXPECT_GE(m.min_angle_deg(), 20.0);
}

TEST(Sector, ZeroRadiusRejected) {
  expect_error(ErrorKind::kInvalidParameter,
               [] { make_sector_mesh({M_PI / 2, 0.0, 0.1}, 0.1); });
  expect_error(ErrorKind::kInvalidParameter,
               [] { make_sector_mesh({M_PI / 2, 1.0, 0.1}, 1.5); });
  expect_error(ErrorKind::kInvalidParameter,
               [] { make_sector_mesh({M_PI / 2, 1.0, 0.1}, -0.1); });
}

TEST(Sector, TagsAndVertexGrading) {
  const SectorDomain s{0.6 * M_PI, 3.0, 0.1};
  const double h = 0.3;
  const Mesh m = make_sector_mesh(s, h);
  ASSERT_EQ(m.corner_nodes.count(0), 1u);
  const Vec2 v = m.nodes[m.corner_nodes.at(0)];
  EXPECT_EQ(v.x, 0.0);
  EXPECT_EQ(v.y, 0.0);
  for (const auto& e : m.boundary_edges) {
    const Vec2 mid = 0.5 * (m.nodes[e.a] + m.nodes[e.b]);
    if (e.tag == BoundaryTag::kArtificial) {
      EXPECT_NEAR(norm(m.nodes[e.a]), s.radius, 1e-3);
    } else {
      const double t = std::atan2(mid.y, mid.x);
      EXPECT_NEAR(std::abs(t), s.alpha / 2, 1e-9);
    }
  }
  // Elements touching the vertex are no larger than h * grading.
  for (const auto& T : m.triangles) {
    const int c = m.corner_nodes.at(0);
    if (T[0] != c && T[1] != c && T[2] != c) continue;
    for (int k = 0; k < 3; ++k)
      EXPECT_LE(norm(m.nodes[T[(k + 1) % 3]] - m.nodes[T[k]]), h * s.grading + 1e-12);
  }
}

TEST(Sector, CountAgainstPolarReference) {
  const SectorDomain s{M_PI / 2, 8.0, 0.1};
  const double h = 0.2;
  const Mesh m = make_sector_mesh(s, h);
  GradedSizing g;
  g.corners = {{0, 0}};
  g.h_corner = h * s.grading;
  g.corner_slope = SectorMeshOptions{}.corner_slope;
  g.h_max = h;
  const Mesh ref = make_sector_mesh_polar(s, g);
  const double ratio = static_cast<double>(m.triangle_count()) / ref.triangle_count();
  EXPECT_GT(ratio, 0.7) << m.triangle_count() << " vs " << ref.triangle_count();
  EXPECT_LT(ratio, 1.3) << m.triangle_count() << " vs " << ref.triangle_count();
  EXPECT_NEAR(ref.area(), m.area(), 1e-2);
}

TEST(Sector, AcuteAndReflexAngles) {
  for (double a : {0.1, 0.25, 1.25, 1.75}) {
    const Mesh m = make_sector_mesh({a * M_PI, 4.0, 0.2}, 0.4);
    const double exact = 0.5 * a * M_PI * 16.0;
    EXPECT_NEAR(m.area(), exact, 5e-3 * exact) << a;
    m.check_consistency();
  }
}

TEST(Sector, FullTurnKeepsSlitOpen) {
  const Mesh m = make_sector_mesh({2 * M_PI, 2.0, 0.2}, 0.3);
  EXPECT_NEAR(m.area(), 4 * M_PI, 0.05);
  // Two distinct nodes at each slit position.
  int slit = 0;
  for (const Vec2& p : m.nodes)
    if (p.x < -1e-9 && std::abs(p.y) < 1e-9) ++slit;
  EXPECT_GT(slit, 0);
  EXPECT_EQ(slit % 2, 0);
}

TEST(Polygon, UnitSquare) {
  const auto sq = PolygonDomain::unit_square();
  for (double a : sq.angles()) EXPECT_NEAR(a, M_PI / 2, 1e-14);
  EXPECT_TRUE(sq.assumption_flag());
  const Mesh m = make_polygon_mesh(sq, 0.1, 0.2);
  EXPECT_NEAR(m.area(), 1.0, 1e-6);
  ASSERT_EQ(m.corner_nodes.size(), 4u);
  for (const auto& [id, node] : m.corner_nodes) {
    EXPECT_EQ(m.nodes[node].x, sq.vertices()[id].x);
    EXPECT_EQ(m.nodes[node].y, sq.vertices()[id].y);
  }
  for (const auto& e : m.boundary_edges) EXPECT_EQ(e.tag, BoundaryTag::kPhysical);
  EXPECT_GE(m.min_angle_deg(), 20.0);
}

TEST(Polygon, EquilateralTriangle) {
  const auto tri = PolygonDomain::create({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}});
  for (double a : tri.angles()) EXPECT_NEAR(a, M_PI / 3, 1e-12);
  const Mesh m = make_polygon_mesh(tri, 0.1, 0.2);
  EXPECT_NEAR(m.area(), std::sqrt(3.0) / 4, 1e-6);
}

TEST(Polygon, InvalidInputs) {
  expect_error(ErrorKind::kInvalidGeometry,
               [] { PolygonDomain::create({{0, 0}, {1, 0}, {2, 0}, {1, 1}}); });
  expect_error(ErrorKind::kInvalidGeometry,
               [] { PolygonDomain::create({{0, 0}, {1, 1}, {1, 0}, {0, 1}}); });
  expect_error(ErrorKind::kInvalidGeometry, [] { PolygonDomain::create({{0, 0}, {1, 0}}); });
}

TEST(Polygon, ClockwiseInputIsReoriented) {
  const auto p = PolygonDomain::create({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  EXPECT_NEAR(p.area(), 1.0, 1e-15);
}

TEST(Polygon, ExteriorAngleSum) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 8;
    std::vector<Vec2> v;
    for (int k = 0; k < n; ++k) {
      const double t = 2 * M_PI * k / n;
      const double r = u(rng);
      v.push_back({r * std::cos(t), r * std::sin(t)});
    }
    const auto p = PolygonDomain::create(v);
    double s = 0;
    for (double a : p.angles()) s += M_PI - a;
    EXPECT_NEAR(s, 2 * M_PI, 1e-10);
  }
}

TEST(Polygon, NonConvexAndMixedAngles) {
  const auto l = PolygonDomain::create({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}});
  EXPECT_FALSE(l.assumption_flag());
  const Mesh m = make_polygon_mesh(l, 0.2, 0.2);
  EXPECT_NEAR(m.area(), 3.0, 1e-9);
  const auto kite = PolygonDomain::create({{0, 0}, {1, -0.5773502691896257}, {1.5, 0}, {1, 0.5773502691896257}});
  const Mesh k = make_polygon_mesh(kite, 0.1, 0.2);
  EXPECT_NEAR(k.area(), kite.area(), 1e-9);
}

TEST(Refine, PreservesCornersAndTags) {
  const Mesh m = make_sector_mesh({M_PI / 2, 2.0, 0.2}, 0.3);
  const Mesh r = refine_uniform(m);
  EXPECT_EQ(r.triangle_count(), 4 * m.triangle_count());
  EXPECT_EQ(r.boundary_edges.size(), 2 * m.boundary_edges.size());
  EXPECT_NEAR(r.area(), m.area(), 1e-12);
  EXPECT_DOUBLE_EQ(r.h, 0.5 * m.h);
  for (const auto& [id, node] : m.corner_nodes) {
    EXPECT_EQ(r.corner_nodes.at(id), node);
    EXPECT_EQ(r.nodes[node].x, m.nodes[node].x);
  }
  int art = 0, art_r = 0;
  for (const auto& e : m.boundary_edges) art += e.tag == BoundaryTag::kArtificial;
  for (const auto& e : r.boundary_edges) art_r += e.tag == BoundaryTag::kArtificial;
  EXPECT_EQ(art_r, 2 * art);
  EXPECT_NEAR(r.min_angle_deg(), m.min_angle_deg(), 1e-9);
}

TEST(Distance, SquareCornersAndBoundary) {
  const auto sq = PolygonDomain::unit_square();
  Mesh m = make_polygon_mesh(sq, 0.1, 0.5);
  const auto dc = distance_field(m, DistanceTargets::corners({0, 1, 2, 3}));
  EXPECT_NEAR(point_distance(m, DistanceTargets::corners({0, 1, 2, 3}), {0.5, 0.5}),
              std::sqrt(0.5), 1e-15);
  const auto db = distance_field(m, DistanceTargets::boundary());
  for (const auto& e : m.boundary_edges) {
    EXPECT_NEAR(db[e.a], 0.0, 1e-15);
    EXPECT_NEAR(db[e.b], 0.0, 1e-15);
  }
  for (const auto& T : m.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = T[k], b = T[(k + 1) % 3];
      const double len = norm(m.nodes[a] - m.nodes[b]);
      EXPECT_LE(std::abs(dc[a] - dc[b]), len + 1e-14);
      EXPECT_LE(std::abs(db[a] - db[b]), len + 1e-14);
    }
  }
  expect_error(ErrorKind::kInvalidParameter,
               [&] { distance_field(m, DistanceTargets::corners({})); });
}

TEST(Distance, AgainstDenseSampling) {
  const auto p = PolygonDomain::create({{0, 0}, {3, 0}, {2.5, 1.5}, {0.5, 2}});
  const Mesh m = make_polygon_mesh(p, 0.3, 0.3);
  const auto d = distance_field(m, DistanceTargets::boundary());
  std::mt19937 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, m.node_count() - 1);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t i = pick(rng);
    const Vec2 x = m.nodes[i];
    // Dense sampling plus local refinement of the best sample.
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < p.size(); ++s) {
      const Vec2 a = p.vertices()[s], b = p.vertices()[(s + 1) % p.size()];
      const int N = 20000;
      int kbest = 0;
      double local = std::numeric_limits<double>::infinity();
      for (int k = 0; k <= N; ++k) {
        const double dist = norm(x - (a + (static_cast<double>(k) / N) * (b - a)));
        if (dist < local) {
          local = dist;
          kbest = k;
        }
      }
      double lo = std::max(0.0, (kbest - 1.0) / N), hi = std::min(1.0, (kbest + 1.0) / N);
      for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (norm(x - (a + m1 * (b - a))) < norm(x - (a + m2 * (b - a)))) hi = m2; else lo = m1;
      }
      best = std::min({best, local, norm(x - (a + 0.5 * (lo + hi) * (b - a)))});
    }
    EXPECT_NEAR(d[i], best, 1e-8);
  }
}

TEST(Io, TextRoundTripAndJson) {
  const Mesh m = make_sector_mesh({0.75 * M_PI, 2.0, 0.2}, 0.3);
  std::stringstream ss;
  write_mesh_text(m, ss);
  const Mesh r = read_mesh_text(ss);
  ASSERT_EQ(r.node_count(), m.node_count());
  EXPECT_EQ(r.fingerprint(), m.fingerprint());
  EXPECT_EQ(r.boundary_edges.size(), m.boundary_edges.size());
  EXPECT_EQ(r.corner_nodes, m.corner_nodes);
  const auto j = nlohmann::json::parse(mesh_to_json(m));
  EXPECT_EQ(j["nodes"].size(), m.node_count());
  EXPECT_EQ(j["triangles"].size(), m.triangle_count());
}

TEST(Box, DomainSubmesh) {
  const auto sq = PolygonDomain::unit_square();
  GradedSizing g;
  g.corners = sq.vertices();
  g.h_corner = 0.03;
  g.h_max = 0.4;
  const BoxMesh b = make_box_mesh(sq, g, 3.0);
  EXPECT_NEAR(b.domain.area(), 1.0, 1e-12);
  EXPECT_NEAR(b.box.area(), 9.0 * 2.0, 1e-9);
  for (std::size_t i = 0; i < b.domain.node_count(); ++i)
    EXPECT_EQ(b.domain.nodes[i], b.box.nodes[b.domain_to_box[i]]);
  double perim = 0;
  for (const auto& e : b.domain.boundary_edges) perim += norm(b.domain.nodes[e.b] - b.domain.nodes[e.a]);
  EXPECT_NEAR(perim, 4.0, 1e-12);
  const BoxMesh r = refine_uniform(b);
  EXPECT_NEAR(r.domain.area(), 1.0, 1e-12);
  for (std::size_t i = 0; i < r.domain.node_count(); ++i)
    EXPECT_EQ(r.domain.nodes[i], r.box.nodes[r.domain_to_box[i]]);
  for (std::size_t t = 0; t < r.domain.triangle_count(); ++t) {
    const auto& D = r.domain.triangles[t];
    const auto& B = r.box.triangles[r.domain_triangle_to_box[t]];
    for (int k = 0; k < 3; ++k) EXPECT_EQ(r.domain_to_box[D[k]], B[k]);
  }
}
