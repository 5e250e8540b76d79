#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "glcorner/assembly.hpp"
#include "glcorner/eigen.hpp"
#include "glcorner/error.hpp"

using namespace glc;

namespace {

// Gauss-Legendre nodes and weights on [0, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0);
  w.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = 0.5 * (1 - z);
    w[i] = 1.0 / ((1 - z * z) * dp * dp);
  }
}

// Collapsed (Duffy) product rule on a triangle: points and weights that sum
// to the triangle area.
struct TriRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> w;
};
TriRule duffy(int n) {
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  TriRule r;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = x[i], v = x[j] * (1 - x[i]);
      r.bary.push_back({1 - u - v, u, v});
      r.w.push_back(w[i] * w[j] * (1 - x[i]) * 2.0);  // reference area 1/2 -> weights sum to 1
    }
  return r;
}

Mesh two_triangle_square() {
  Mesh m;
  m.nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  m.boundary_edges = {{0, 1, BoundaryTag::kPhysical, 0},
                      {1, 2, BoundaryTag::kPhysical, 1},
                      {2, 3, BoundaryTag::kPhysical, 2},
                      {3, 0, BoundaryTag::kPhysical, 3}};
  m.h = std::sqrt(2.0);
  return m;
}

// Brute-force stiffness: integrates conj(P phi_i) . P phi_j with
// P = -i grad - b A at Gauss points of every element.
Eigen::MatrixXcd brute_force_K(const Mesh& m, double b, const GaugeField& g, int n) {
  const TriRule rule = duffy(n);
  const auto N = static_cast<Eigen::Index>(m.node_count());
  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(N, N);
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    const auto& T = m.triangles[t];
    const Vec2 p[3] = {m.nodes[T[0]], m.nodes[T[1]], m.nodes[T[2]]};
    const double area = 0.5 * cross(p[1] - p[0], p[2] - p[0]);
    // Gradients from the inverse Jacobian of the affine map.
    Eigen::Matrix2d J;
    J << p[1].x - p[0].x, p[2].x - p[0].x, p[1].y - p[0].y, p[2].y - p[0].y;
    const Eigen::Matrix2d Jit = J.inverse().transpose();
    const Eigen::Vector2d gref[3] = {{-1, -1}, {1, 0}, {0, 1}};
    Eigen::Vector2d grad[3];
    for (int i = 0; i < 3; ++i) grad[i] = Jit * gref[i];
    for (std::size_t q = 0; q < rule.w.size(); ++q) {
      const auto& l = rule.bary[q];
      const Vec2 x = l[0] * p[0] + l[1] * p[1] + l[2] * p[2];
      const Vec2 A = g.base(x);
      std::complex<double> P[3][2];
      for (int i = 0; i < 3; ++i) {
        P[i][0] = cplx(0, -1) * grad[i].x() - b * A.x * l[i];
        P[i][1] = cplx(0, -1) * grad[i].y() - b * A.y * l[i];
      }
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          K(T[i], T[j]) += rule.w[q] * area *
                           (std::conj(P[i][0]) * P[j][0] + std::conj(P[i][1]) * P[j][1]);
    }
  }
  return K;
}

// Brute-force GL energy of a nodal field.
double brute_force_energy(const Mesh& m, const CVec& psi, const EnergyParams& e,
                          const GaugeField& g, int n) {
  const TriRule rule = duffy(n);
  double E = 0;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    const auto& T = m.triangles[t];
    const Vec2 p[3] = {m.nodes[T[0]], m.nodes[T[1]], m.nodes[T[2]]};
    const double area = 0.5 * cross(p[1] - p[0], p[2] - p[0]);
    Eigen::Matrix2d J;
    J << p[1].x - p[0].x, p[2].x - p[0].x, p[1].y - p[0].y, p[2].y - p[0].y;
    const Eigen::Matrix2d Jit = J.inverse().transpose();
    const Eigen::Vector2d gref[3] = {{-1, -1}, {1, 0}, {0, 1}};
    cplx gx = 0, gy = 0;
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d gr = Jit * gref[i];
      gx += gr.x() * psi[T[i]];
      gy += gr.y() * psi[T[i]];
    }
    for (std::size_t q = 0; q < rule.w.size(); ++q) {
      const auto& l = rule.bary[q];
      const Vec2 x = l[0] * p[0] + l[1] * p[1] + l[2] * p[2];
      const cplx v = l[0] * psi[T[0]] + l[1] * psi[T[1]] + l[2] * psi[T[2]];
      const Vec2 A = g.base(x);
      const cplx px = cplx(0, -1) * gx - e.b * A.x * v;
      const cplx py = cplx(0, -1) * gy - e.b * A.y * v;
      const double m2 = std::norm(v);
      E += rule.w[q] * area *
           (std::norm(px) + std::norm(py) - e.c2 * m2 + 0.5 * e.c4 * m2 * m2);
    }
  }
  return E;
}

CVec random_field(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  CVec v(static_cast<Eigen::Index>(n));
  for (auto& z : v) z = cplx(u(rng), u(rng));
  return v;
}

// Central differences with one Richardson step; the step shrinks with |x|
// because the sector gauges vary on the scale of the distance to the vertex.
double numerical_curl(const GaugeField& g, Vec2 x) {
  auto central = [&](double d) {
    const double dAy_dx = (g.base({x.x + d, x.y}).y - g.base({x.x - d, x.y}).y) / (2 * d);
    const double dAx_dy = (g.base({x.x, x.y + d}).x - g.base({x.x, x.y - d}).x) / (2 * d);
    return dAy_dx - dAx_dy;
  };
  const double d = 2e-4 * std::min(1.0, norm(x));
  return (4.0 * central(0.5 * d) - central(d)) / 3.0;
}

}  // namespace

TEST(Assembly, KIsExactlyHermitian) {
  const Mesh m = make_polygon_mesh(PolygonDomain::regular(5, 1.0), 0.2, 0.5);
  for (double b : {0.0, 3.0, 40.0}) {
    const auto sys = assemble(m, b, make_polygon_gauge(PolygonDomain::regular(5, 1.0), std::max(b, 1.0)));
    const SpMatC Kh = sys.K.adjoint();
    const SpMatC D = sys.K - Kh;
    double worst = 0;
    for (int k = 0; k < D.outerSize(); ++k)
      for (SpMatC::InnerIterator it(D, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    EXPECT_EQ(worst, 0.0);
  }
}

TEST(Assembly, ZeroFieldHasConstantKernel) {
  const Mesh m = make_polygon_mesh(PolygonDomain::unit_square(), 0.15, 1.0);
  const auto sys = assemble(m, 0.0, GaugeField::standard());
  const CVec one = CVec::Ones(static_cast<Eigen::Index>(m.node_count()));
  EXPECT_LT((sys.K * one).norm(), 1e-12);
  const auto r = smallest_eigenpairs(sys, 1, 1e-10);
  EXPECT_NEAR(r.eigenvalues[0], 0.0, 1e-10);
  const CVec& v = r.eigenvectors[0];
  const cplx ref = v[0];
  for (Eigen::Index i = 0; i < v.size(); ++i) EXPECT_NEAR(std::abs(v[i] - ref), 0.0, 1e-7);
}

TEST(Assembly, ElementEntriesMatchBruteForceQuadrature) {
  const Mesh m = two_triangle_square();
  for (double b : {0.0, 1.0, 7.5}) {
    const auto sys = assemble(m, b, GaugeField::standard());
    const Eigen::MatrixXcd ref = brute_force_K(m, b, GaugeField::standard(), 12);
    const Eigen::MatrixXcd K(sys.K);
    EXPECT_LT((K - ref).cwiseAbs().maxCoeff(), 1e-12) << "b = " << b;
    // Mass against the closed form on each element.
    const Eigen::MatrixXd M(sys.M);
    EXPECT_NEAR(M.sum(), 1.0, 1e-14);
    EXPECT_NEAR(M(0, 0), 2.0 * 0.5 / 12 * 2, 1e-14);
  }
}

TEST(Assembly, CurvedGaugeEntriesConvergeToOracle) {
  // The degree-4 rule is not exact for the blended gauge; entries still agree
  // closely with a high-order oracle on a small patch.
  const GaugeField g = make_sector_gauge(0.5 * M_PI, SectorGauge::kEdgeBlend, 1.0);
  Mesh m = two_triangle_square();
  for (auto& p : m.nodes) p = 0.1 * p + Vec2{0.3, 0.05};
  const auto sys = assemble(m, 1.0, g);
  const Eigen::MatrixXcd ref = brute_force_K(m, 1.0, g, 16);
  const Eigen::MatrixXcd K(sys.K);
  EXPECT_LT((K - ref).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Assembly, EssentialZeroDropsArcNodes) {
  const Mesh m = make_sector_mesh({0.5 * M_PI, 3.0, 0.25}, 0.4);
  const auto nat = assemble(m, 1.0, GaugeField::standard(), ArcCondition::kNatural);
  const auto ess = assemble(m, 1.0, GaugeField::standard(), ArcCondition::kEssentialZero);
  const auto art = m.nodes_with_tag(BoundaryTag::kArtificial);
  const auto n_art = static_cast<std::size_t>(std::count(art.begin(), art.end(), 1));
  EXPECT_EQ(nat.size(), m.node_count());
  EXPECT_EQ(ess.size(), m.node_count() - n_art);
  const CVec x = random_field(ess.size(), 3);
  const CVec full = ess.expand(x);
  EXPECT_EQ((ess.restrict_to_dofs(full) - x).norm(), 0.0);
  for (std::size_t i = 0; i < m.node_count(); ++i)
    if (art[i]) EXPECT_EQ(full[static_cast<Eigen::Index>(i)], cplx(0.0));
  // Restriction of the natural matrix equals the essential one.
  const Eigen::MatrixXcd Kn(nat.K), Ke(ess.K);
  for (std::size_t a = 0; a < ess.size(); ++a)
    for (std::size_t b = 0; b < ess.size(); ++b)
      EXPECT_EQ(Ke(a, b), Kn(ess.dof_to_node[a], ess.dof_to_node[b]));
}

TEST(Assembly, L4NormConstantAndOracle) {
  const Mesh m = make_polygon_mesh(PolygonDomain::regular(6, 1.0), 0.3, 0.5);
  const cplx c(0.6, -0.3);
  const CVec psi = CVec::Constant(static_cast<Eigen::Index>(m.node_count()), c);
  EXPECT_NEAR(l4_norm4(psi, m), std::pow(std::abs(c), 4) * m.area(), 1e-13);

  const CVec r = random_field(m.node_count(), 11);
  const TriRule rule = duffy(6);
  double ref = 0;
  for (std::size_t t = 0; t < m.triangle_count(); ++t) {
    const auto& T = m.triangles[t];
    for (std::size_t q = 0; q < rule.w.size(); ++q) {
      const auto& l = rule.bary[q];
      const cplx v = l[0] * r[T[0]] + l[1] * r[T[1]] + l[2] * r[T[2]];
      ref += rule.w[q] * m.triangle_area(t) * std::norm(v) * std::norm(v);
    }
  }
  EXPECT_NEAR(l4_norm4(r, m), ref, 1e-10 * ref);
  EXPECT_NEAR(l4_norm(r, m), std::pow(ref, 0.25), 1e-10);
}

TEST(Energy, ZeroStateHasZeroEnergy) {
  const Mesh m = make_polygon_mesh(PolygonDomain::unit_square(), 0.2, 1.0);
  GLState s;
  s.psi = CVec::Zero(static_cast<Eigen::Index>(m.node_count()));
  s.kappa = 3.0;
  s.field_H = 2.0;
  EXPECT_EQ(gl_energy(s, m), 0.0);
}

TEST(Energy, TrialStateAlongGroundState) {
  const Mesh m = make_polygon_mesh(PolygonDomain::unit_square(), 0.12, 0.5);
  const double kappa = 4.0, H = 2.5;
  const auto sys = assemble(m, kappa * H, GaugeField::standard());
  const auto eig = smallest_eigenpairs(sys, 1, 1e-11);
  const double lam = eig.eigenvalues[0];
  const CVec& u = eig.eigenvectors[0];
  const double u4 = l4_norm4(u, m);
  GLState s;
  s.kappa = kappa;
  s.field_H = H;
  for (double t : {0.1, 0.7, 1.3}) {
    s.psi = t * u;
    const double expect = t * t * (lam - kappa * kappa) + 0.5 * kappa * kappa * std::pow(t, 4) * u4;
    EXPECT_NEAR(gl_energy(s, m), expect, 1e-9 * std::max(1.0, std::abs(expect)));
  }
}

TEST(Energy, RandomStateMatchesOracle) {
  const Mesh m = make_polygon_mesh(PolygonDomain::regular(5, 1.0), 0.25, 0.5);
  GLState s;
  s.psi = random_field(m.node_count(), 5);
  s.kappa = 2.0;
  s.field_H = 1.7;
  const double ref = brute_force_energy(m, s.psi, gl_params(2.0, 1.7), GaugeField::standard(), 8);
  EXPECT_NEAR(gl_energy(s, m), ref, 1e-8 * std::abs(ref));
}

TEST(Energy, GradientCentralDifferenceOrder) {
  const Mesh m = make_polygon_mesh(PolygonDomain::unit_square(), 0.2, 1.0);
  GLState s;
  s.psi = random_field(m.node_count(), 21);
  s.kappa = 3.0;
  s.field_H = 1.2;
  const CVec g = gl_gradient(s, m);
  const CVec d = random_field(m.node_count(), 22);
  const double exact = 2.0 * g.dot(d).real();  // dE = 2 Re <g, d>
  auto fd = [&](double eps) {
    GLState a = s, b = s;
    a.psi += eps * d;
    b.psi -= eps * d;
    return (gl_energy(a, m) - gl_energy(b, m)) / (2 * eps);
  };
  const double e1 = std::abs(fd(1e-2) - exact), e2 = std::abs(fd(5e-3) - exact);
  EXPECT_GE(std::log2(e1 / e2), 1.9);
  EXPECT_LT(e2, 1e-3 * std::abs(exact));
}

TEST(Energy, CoupledFieldEnergyIsAdded) {
  const Mesh m = make_polygon_mesh(PolygonDomain::unit_square(), 0.3, 1.0);
  GLState s;
  s.psi = random_field(m.node_count(), 2);
  s.field_energy = 0.75;
  GLState t = s;
  t.field_energy = 0.0;
  EXPECT_NEAR(gl_energy(s, m) - gl_energy(t, m), 0.75, 1e-12);
}

TEST(Gauge, CurlIsOneEverywhere) {
  const std::vector<Vec2> pts = {{0.3, 0.1}, {1.2, -0.4}, {2.0, 1.5}, {0.05, 0.02}, {-1.0, 0.3}};
  for (double alpha : {0.3 * M_PI, 0.5 * M_PI, M_PI, 1.2 * M_PI}) {
    for (auto type : {SectorGauge::kStandard, SectorGauge::kEdgeBlend, SectorGauge::kAngular}) {
      const GaugeField g = make_sector_gauge(alpha, type, 2.0);
      for (const Vec2& p : pts) {
        // Stay inside the open sector where the blend is smooth.
        if (std::abs(std::atan2(p.y, p.x)) >= alpha / 2) continue;
        EXPECT_NEAR(numerical_curl(g, p), 1.0, 1e-6);
      }
    }
  }
  const PolygonDomain sq = PolygonDomain::unit_square();
  const GaugeField pg = make_polygon_gauge(sq, 50.0);
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 50; ++i) EXPECT_NEAR(numerical_curl(pg, {u(rng), u(rng)}), 1.0, 1e-6);
}

TEST(Gauge, EdgeGaugeIsShiftedLandauAlongEdges) {
  // Near the lower edge of a wide sector (away from the blend) the field is
  // the Landau gauge -(t - xi0 / sqrt(b)) e.
  const double alpha = 0.5 * M_PI, b = 4.0;
  const GaugeField g = make_sector_gauge(alpha, SectorGauge::kEdgeBlend, b);
  const Vec2 e{std::cos(-alpha / 2), std::sin(-alpha / 2)};
  const Vec2 n{std::sin(alpha / 2), std::cos(alpha / 2)};
  const Vec2 x = 5.0 * e;  // on the edge: theta = -alpha/2, blend weight 1
  const Vec2 A = g.base(x);
  const double sigma = cross(e, n);
  const Vec2 expect = -sigma * (0.0 - 0.76818365 / std::sqrt(b)) * e;
  EXPECT_NEAR(A.x, expect.x, 1e-12);
  EXPECT_NEAR(A.y, expect.y, 1e-12);
}

TEST(Gauge, CovarianceErrorIsSecondOrder) {
  // lambda_1 with A and with A + grad chi agree up to O(h^2).
  const PolygonDomain sq = PolygonDomain::unit_square();
  const double b = 6.0;
  const GaugeField g0 = GaugeField::standard();
  const GaugeField g1 = GaugeField::analytic([](Vec2 x) {
    const Vec2 f = standard_f(x);
    return Vec2{f.x + 0.4 * std::cos(2 * x.x) * std::cos(3 * x.y),
                f.y - 0.6 * std::sin(2 * x.x) * std::sin(3 * x.y)};
  });
  std::vector<double> diff;
  Mesh m = make_polygon_mesh(sq, 0.2, 1.0);
  for (int level = 0; level < 3; ++level) {
    if (level) m = refine_uniform(m);
    const double l0 = smallest_eigenpairs(assemble(m, b, g0), 1, 1e-10).eigenvalues[0];
    const double l1 = smallest_eigenpairs(assemble(m, b, g1), 1, 1e-10).eigenvalues[0];
    diff.push_back(std::abs(l1 - l0));
  }
  EXPECT_GE(std::log2(diff[1] / diff[2]), 1.8);
  EXPECT_LT(diff[2], diff[0]);
}

TEST(Assembly, CooExportRoundTrip) {
  const Mesh m = two_triangle_square();
  const auto sys = assemble(m, 2.0, GaugeField::standard());
  std::ostringstream out;
  write_coo(sys.K, out);
  std::istringstream in(out.str());
  int r, c;
  double re, im;
  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(4, 4);
  int lines = 0;
  while (in >> r >> c >> re >> im) {
    K(r, c) = cplx(re, im);
    ++lines;
  }
  EXPECT_EQ(lines, sys.K.nonZeros());
  EXPECT_EQ((K - Eigen::MatrixXcd(sys.K)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Assembly, InvalidInputs) {
  const Mesh m = two_triangle_square();
  EXPECT_THROW(assemble(m, -1.0, GaugeField::standard()), Error);
  EXPECT_THROW(assemble(m, 1.0, GaugeField::explicit_nodal({{0, 0}})), Error);
  GLState s;
  s.psi = CVec::Zero(3);
  EXPECT_THROW(gl_energy(s, m), Error);
}
