#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numeric>

#include "glcorner/diagnostics.hpp"
#include "glcorner/error.hpp"

using namespace glc;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kSolverError;
}

constexpr double kMu = 0.55;
constexpr double kKappa = 10.0;

struct Fixture {
  PolygonDomain poly = PolygonDomain::unit_square();
  Mesh mesh;
  MinimizationOutcome outcome;
  CornerSpectrum spectrum;
};

// Corner-regime minimizer on the square, mu = kappa / H strictly between the
// right-angle value and Theta0.
const Fixture& square_state() {
  static const Fixture f = [] {
    Fixture f;
    const double H = kKappa / kMu;
    f.mesh = make_field_mesh(f.poly, kKappa * H, {});
    f.outcome = minimize_frozen_multistart(f.mesh, kKappa, H, make_polygon_gauge(f.poly, kKappa * H));
    f.spectrum.mu_by_corner.assign(4, 0.51);
    return f;
  }();
  return f;
}

MinimizationOutcome normal_state(const Mesh& m, double kappa, double H) {
  MinimizationOutcome o;
  o.state.psi = CVec::Zero(static_cast<Eigen::Index>(m.node_count()));
  o.state.kappa = kappa;
  o.state.field_H = H;
  o.trivial_flag = true;
  return o;
}

}  // namespace

TEST(Agmon, ZeroRateRatioIsAtLeastOne) {
  const Fixture& f = square_state();
  ASSERT_FALSE(f.outcome.trivial_flag);
  const AgmonReport r = agmon_corner(f.mesh, f.outcome, {0, 1, 2, 3}, 0.0, 3.0);
  EXPECT_GE(r.ratio, 1.0);
  EXPECT_GE(r.weighted_mass, r.total_mass);
  EXPECT_LE(r.near_mass, r.total_mass * (1 + 1e-12));
  EXPECT_NEAR(r.total_mass, f.outcome.l2 * f.outcome.l2, 1e-10 * r.total_mass);
}

TEST(Agmon, RatioGrowsWithRateAndDecayIsPositive) {
  const Fixture& f = square_state();
  double prev = 0;
  for (double e : {0.0, 0.1, 0.2}) {
    const AgmonReport r = agmon_corner(f.mesh, f.outcome, {0, 1, 2, 3}, e, 3.0);
    EXPECT_GT(r.ratio, prev);
    prev = r.ratio;
    EXPECT_GT(r.fitted_rate, 0.0);
    EXPECT_GE(r.fit_bins, 3u);
  }
  EXPECT_EQ(agmon_grid(f.mesh, f.outcome, {0, 1, 2, 3}, {0.0, 0.1}, {2.0, 3.0, 4.0}).size(), 6u);
}

TEST(Agmon, NearZoneSupportBoundsTheWeight) {
  // A state supported within sqrt(kappa H) d <= M of corner 0: the weight is
  // at most e^{eps M} on its support.
  const Fixture& f = square_state();
  MinimizationOutcome o = f.outcome;
  const Vec2 c = f.mesh.nodes[f.mesh.corner_nodes.at(0)];
  const double sb = std::sqrt(o.state.kappa * o.state.field_H), M = 3.0, eps = 0.2;
  for (std::size_t i = 0; i < f.mesh.node_count(); ++i)
    if (sb * norm(f.mesh.nodes[i] - c) > 0.5 * M) o.state.psi[static_cast<Eigen::Index>(i)] = 0.0;
  const AgmonReport r = agmon_corner(f.mesh, o, {0}, eps, M);
  const AgmonReport r0 = agmon_corner(f.mesh, o, {0}, 0.0, M);
  EXPECT_NEAR(r0.near_mass, r0.total_mass, 1e-12 * r0.total_mass);
  EXPECT_LE(r.ratio, std::exp(eps * M) * r0.ratio);
  EXPECT_GE(r.ratio, r0.ratio);
}

TEST(Agmon, TrivialStateHasNoRatio) {
  const Fixture& f = square_state();
  const MinimizationOutcome o = normal_state(f.mesh, kKappa, kKappa / kMu);
  EXPECT_EQ(kind_of([&] { agmon_corner(f.mesh, o, {0}, 0.1, 3.0); }), ErrorKind::kUndefinedRatio);
  EXPECT_EQ(kind_of([&] { agmon_boundary(f.mesh, o, 0.1, 3.0); }), ErrorKind::kUndefinedRatio);
}

TEST(Agmon, BoundaryVersion) {
  const Fixture& f = square_state();
  const AgmonReport r = agmon_boundary(f.mesh, f.outcome, 0.1, 2.0);
  EXPECT_GE(r.ratio, 1.0);
  EXPECT_GT(r.fitted_rate, 0.0);
  MinimizationOutcome low = f.outcome;
  low.state.field_H = 0.9 * kKappa;
  EXPECT_EQ(kind_of([&] { agmon_boundary(f.mesh, low, 0.1, 2.0); }), ErrorKind::kInvalidParameter);
  const WeakDecayReport w = weak_decay(f.mesh, f.outcome);
  EXPECT_GE(w.ratio, 1.0);
  EXPECT_GT(w.scaled_total, 0.0);
}

TEST(CornerMass, SquareSplitsEvenly) {
  const Fixture& f = square_state();
  const CornerMassProfile p = corner_mass_profile(f.mesh, f.outcome, f.spectrum, kMu, 6.0);
  ASSERT_EQ(p.fraction.size(), 4u);
  EXPECT_FALSE(p.trivial);
  for (double x : p.fraction) EXPECT_NEAR(x, 0.25, 0.01);
  EXPECT_LE(p.off_corner, 0.05);
  EXPECT_EQ(p.sigma_prime.size(), 4u);
  const double sum = std::accumulate(p.fraction.begin(), p.fraction.end(), 0.0);
  EXPECT_LE(sum, 1.0 + 1e-12);
  EXPECT_NEAR(sum + p.off_corner, 1.0, 1e-12);
}

TEST(CornerMass, TrivialStateReportsZeros) {
  const Fixture& f = square_state();
  const CornerMassProfile p =
      corner_mass_profile(f.mesh, normal_state(f.mesh, kKappa, kKappa / kMu), f.spectrum, kMu);
  EXPECT_TRUE(p.trivial);
  for (double x : p.fraction) EXPECT_EQ(x, 0.0);
}

TEST(CornerMass, SharpestCornerTakesTheMass) {
  // Angles pi/2, pi/3, 7pi/12, 7pi/12; mu between the two smallest corner
  // values localizes at the pi/3 corner.
  const double s3 = std::sqrt(3.0);
  PolygonDomain poly = PolygonDomain::create({{0, 0}, {1, 0}, {0.6, 0.4 * s3}, {0, 0.4 * s3 - 0.1607695154586736}});
  Mu1Options mo;
  mo.accuracy = 5e-3;
  Mu1Cache cache(mo);
  const CornerSpectrum cs = corner_spectrum(poly, cache);
  ASSERT_LT(cs.mu_by_corner[1], cs.mu_by_corner[0]);
  const double mu = 0.5 * (cs.mu_by_corner[1] + cs.mu_by_corner[0]);
  const double kappa = 15.0, H = kappa / mu;
  const Mesh m = make_field_mesh(poly, kappa * H, {});
  const MinimizationOutcome o = minimize_frozen_multistart(m, kappa, H, make_polygon_gauge(poly, kappa * H));
  ASSERT_FALSE(o.trivial_flag);
  const CornerMassProfile p = corner_mass_profile(m, o, cs, mu, 6.0);
  ASSERT_EQ(p.sigma_prime, std::vector<int>{1});
  EXPECT_GE(p.fraction[1], 0.9);
  EXPECT_GE(p.sigma_prime_fraction, 0.9);
}

TEST(CornerEnergy, SumAndGap) {
  const PolygonDomain sq = PolygonDomain::unit_square();
  SectorModelResult s;
  s.alpha = 0.5 * M_PI;
  s.mu1_param = s.mu2_param = kMu;
  s.energy = -0.0137;
  s.error = 1e-4;
  const EnergyReport r = energy_vs_corner_sum(-0.0575, sq, {s}, kMu);
  EXPECT_NEAR(r.corner_sum, -0.0548, 1e-15);
  EXPECT_NEAR(r.corner_sum_error, 4e-4, 1e-15);
  EXPECT_NEAR(r.rel_gap, 0.0027 / 0.0548, 1e-12);
  EXPECT_FALSE(r.degenerate);

  s.energy = 0.0;
  const EnergyReport z = energy_vs_corner_sum(-1e-9, sq, {s}, kMu);
  EXPECT_TRUE(z.degenerate);
  EXPECT_EQ(z.corner_sum, 0.0);

  s.mu1_param = 0.5;
  EXPECT_EQ(kind_of([&] { energy_vs_corner_sum(-0.05, sq, {s}, kMu); }), ErrorKind::kInvalidParameter);
  EXPECT_EQ(kind_of([&] { energy_vs_corner_sum(-0.05, sq, {}, kMu); }), ErrorKind::kInvalidParameter);
}

TEST(Sanity, FrozenAndTrivialStatesPass) {
  const Fixture& f = square_state();
  const SanityReport r = minimizer_sanity(f.mesh, f.outcome);
  EXPECT_TRUE(r.all_hold);
  EXPECT_EQ(r.items.size(), 5u);
  EXPECT_TRUE(std::isnan(r.field_constant));
  const SanityReport z = minimizer_sanity(f.mesh, normal_state(f.mesh, kKappa, kKappa / kMu));
  EXPECT_TRUE(z.all_hold);
  for (const auto& it : z.items) EXPECT_EQ(it.lhs, 0.0) << it.name;
}

TEST(Sanity, CoupledStatePasses) {
  const PolygonDomain sq = PolygonDomain::unit_square();
  const double kappa = 6.0, H = kappa / kMu;
  const BoxMesh box = make_box_mesh(sq, field_sizing(sq, kappa * H, {}), 3.0);
  const MinimizationOutcome r = minimize_coupled(box, kappa, H);
  ASSERT_FALSE(r.trivial_flag);
  const SanityReport s = minimizer_sanity(box.domain, r);
  EXPECT_TRUE(s.all_hold);
  EXPECT_GT(s.field_constant, 0.0);
}

TEST(Sanity, OversizedStateIsFlagged) {
  const Fixture& f = square_state();
  MinimizationOutcome o = f.outcome;
  o.state.psi *= 4.0;
  const SanityReport r = minimizer_sanity(f.mesh, o);
  EXPECT_FALSE(r.all_hold);
  EXPECT_FALSE(r.items[0].holds);
}

TEST(Trend, SlopeAndSignificance) {
  const Trend t = linear_trend({1, 2, 3, 4}, {1, 3, 5, 7});
  EXPECT_NEAR(t.slope, 2.0, 1e-14);
  EXPECT_NEAR(t.stderr_slope, 0.0, 1e-14);
  EXPECT_TRUE(t.positive);
  const Trend flat = linear_trend({10, 15, 20, 30}, {4.05, 4.21, 4.16, 4.05});
  EXPECT_FALSE(flat.positive);
  EXPECT_EQ(kind_of([] { linear_trend({1}, {1}); }), ErrorKind::kInvalidParameter);
  EXPECT_EQ(kind_of([] { linear_trend({1, 1}, {1, 2}); }), ErrorKind::kInvalidParameter);
}
