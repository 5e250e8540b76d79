#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <sstream>

#include "glcorner/error.hpp"
#include "glcorner/glmin.hpp"

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

// Right-angle corner value to two digits; only places the test fields.
constexpr double kLambda1 = 0.51;
constexpr double kKappa = 10.0;

const PolygonDomain& square() {
  static const PolygonDomain sq = PolygonDomain::unit_square();
  return sq;
}

const Mesh& square_mesh() {
  static const Mesh m = make_field_mesh(square(), kKappa * kKappa / kLambda1, {});
  return m;
}

MinimizationOutcome frozen(double H, InitKind init) {
  DescentOptions d;
  d.init = init;
  return minimize_frozen(square_mesh(), kKappa, H, make_polygon_gauge(square(), kKappa * H), d);
}

double kinetic(const Mesh& m, const GLState& s) {
  const auto sys = assemble(m, s.kappa * s.field_H, s.potential);
  const CVec x = sys.restrict_to_dofs(s.psi);
  return x.dot(sys.K * x).real();
}

void expect_basic_inequalities(const Mesh& m, const MinimizationOutcome& r) {
  const SpMatR M = assemble_mass(m);
  const double l2 = l2_norm(r.state.psi, M);
  const double k = r.state.kappa;
  EXPECT_LE(r.max_abs, 1.0 + 1e-3);
  EXPECT_LE(std::pow(l4_norm(r.state.psi, m), 2), l2 * (1 + 1e-6) + 1e-12);
  EXPECT_LE(std::sqrt(kinetic(m, r.state)), k * l2 * (1 + 1e-6) + 1e-12);
  EXPECT_LE(r.energy, 0.0);
}

}  // namespace

TEST(Init, NamesRoundTrip) {
  for (auto k : {InitKind::kZero, InitKind::kLinearMode, InitKind::kRandom, InitKind::kExplicit})
    EXPECT_EQ(init_from_string(to_string(k)), k);
  EXPECT_EQ(kind_of([] { init_from_string("warm"); }), ErrorKind::kInvalidParameter);
}

TEST(Frozen, BelowOnsetBeatsTrialEnergy) {
  const double H = 0.9 * kKappa / kLambda1;
  const MinimizationOutcome r = frozen(H, InitKind::kLinearMode);
  EXPECT_FALSE(r.trivial_flag);
  EXPECT_LT(r.lambda1, kKappa * kKappa);
  EXPECT_LT(r.trial_energy, 0.0);
  EXPECT_LE(r.energy, r.trial_energy + 1e-10);
  for (std::size_t i = 1; i < r.energy_history.size(); ++i)
    EXPECT_LE(r.energy_history[i], r.energy_history[i - 1] + 1e-13 * std::abs(r.energy_history[i - 1]));
  expect_basic_inequalities(square_mesh(), r);

  // A random start reaches the same state energy.
  const MinimizationOutcome q = frozen(H, InitKind::kRandom);
  EXPECT_FALSE(q.trivial_flag);
  EXPECT_NEAR(q.energy, r.energy, 1e-6 * std::abs(r.energy));
}

TEST(Frozen, AboveOnsetIsNormal) {
  const double H = 1.5 * kKappa / kLambda1;
  for (auto init : {InitKind::kLinearMode, InitKind::kRandom}) {
    const MinimizationOutcome r = frozen(H, init);
    EXPECT_TRUE(r.trivial_flag) << to_string(init);
    EXPECT_NEAR(r.energy, 0.0, 1e-10);
    expect_basic_inequalities(square_mesh(), r);
  }
  EXPECT_GT(frozen(H, InitKind::kLinearMode).lambda1, kKappa * kKappa);
}

TEST(Frozen, ZeroStartStaysAtTheNormalState) {
  const MinimizationOutcome r = frozen(0.9 * kKappa / kLambda1, InitKind::kZero);
  EXPECT_TRUE(r.trivial_flag);
  EXPECT_EQ(r.energy, 0.0);
}

TEST(Frozen, BudgetExhaustionCarriesBestState) {
  DescentOptions d;
  d.init = InitKind::kRandom;
  d.max_iter = 2;
  const double H = 0.9 * kKappa / kLambda1;
  try {
    minimize_frozen(square_mesh(), kKappa, H, make_polygon_gauge(square(), kKappa * H), d);
    FAIL() << "expected a convergence failure";
  } catch (const MinimizationFailure& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConvergenceFailure);
    EXPECT_LE(e.best().iterations, 2);
    EXPECT_EQ(static_cast<std::size_t>(e.best().state.psi.size()), square_mesh().node_count());
  }
}

TEST(Frozen, RejectsBadArguments) {
  EXPECT_EQ(kind_of([] { minimize_frozen(square_mesh(), -1.0, 5.0); }), ErrorKind::kInvalidParameter);
  EXPECT_EQ(kind_of([] { minimize_frozen(square_mesh(), 5.0, 0.0); }), ErrorKind::kInvalidParameter);
  DescentOptions d;
  d.init = InitKind::kExplicit;
  d.explicit_psi = CVec::Zero(3);
  EXPECT_EQ(kind_of([&] { minimize_frozen(square_mesh(), 5.0, 5.0, d); }), ErrorKind::kInvalidParameter);
}

TEST(Coupled, MonotoneSweepsAndBasicInequalities) {
  const double kappa = 6.0, H = 0.9 * kappa / kLambda1;
  const BoxMesh box = make_box_mesh(square(), field_sizing(square(), kappa * H, {}), 3.0);
  const MinimizationOutcome fr = minimize_frozen(box.domain, kappa, H);
  const MinimizationOutcome r = minimize_coupled(box, kappa, H);
  EXPECT_FALSE(r.trivial_flag);
  ASSERT_GE(r.sweep_objective.size(), 1u);
  for (std::size_t i = 1; i < r.sweep_objective.size(); ++i)
    EXPECT_LE(r.sweep_objective[i], r.sweep_objective[i - 1]);
  EXPECT_LE(r.energy, fr.energy + 1e-10);
  EXPECT_LE(H * r.curl_l2, r.l2 + 1e-8);
  expect_basic_inequalities(box.domain, r);
  // The correction is small in the sense of the basic curl estimate.
  EXPECT_LE(std::abs(r.energy - fr.energy), r.l2 * r.l2 * kappa * kappa / (H * H));
}

TEST(Coupled, NormalStateHasZeroCurrent) {
  const double kappa = 6.0, H = 1.6 * kappa / kLambda1;
  const BoxMesh box = make_box_mesh(square(), field_sizing(square(), kappa * H, {}), 3.0);
  const MinimizationOutcome r = minimize_coupled(box, kappa, H);
  EXPECT_TRUE(r.trivial_flag);
  for (const Vec2& v : r.box_field) {
    EXPECT_EQ(v.x, 0.0);
    EXPECT_EQ(v.y, 0.0);
  }
  EXPECT_EQ(r.curl_l2, 0.0);
}

TEST(SectorModel, TrivialAtOrBelowCornerValue) {
  const SectorModelResult r = sector_model(0.5 * M_PI, 0.45, 0.45, 12.0, 1e-3);
  EXPECT_TRUE(r.trivial);
  EXPECT_EQ(r.energy, 0.0);
}

TEST(SectorModel, NontrivialWithinMaximumBound) {
  SectorModelOptions o;
  o.refinements = 0;
  const SectorModelResult r = sector_model(0.5 * M_PI, 0.55, 1.1, 20.0, 1e-3, o);
  EXPECT_FALSE(r.trivial);
  EXPECT_LT(r.energy, 0.0);
  EXPECT_LE(r.max_abs, 0.55 / 1.1 + 1e-3);
  EXPECT_GT(r.decay_rate, 0.0);
}

TEST(SectorModel, ScaledFunctionalHasTheSameEnergy) {
  SectorModelOptions o;
  o.refinements = 0;
  const SectorModelResult a = sector_model(0.5 * M_PI, 0.55, 0.55, 20.0, 1e-3, o);
  o.scale = 2.0;
  const SectorModelResult b = sector_model(0.5 * M_PI, 0.55, 0.55, 20.0, 1e-3, o);
  EXPECT_LE(std::abs(a.energy - b.energy), 1e-10);
  EXPECT_LE(std::abs(a.raw_energy - b.raw_energy), 1e-10);
}

TEST(SectorModel, ShortTruncationIsReported) {
  SectorModelOptions o;
  o.refinements = 0;
  EXPECT_EQ(kind_of([&] { sector_model(0.5 * M_PI, 0.55, 0.55, 8.0, 1e-3, o); }),
            ErrorKind::kAccuracyNotMet);
  EXPECT_EQ(kind_of([&] { sector_model(0.5 * M_PI, 0.7, 0.7, 12.0, 1e-3, o); }),
            ErrorKind::kInvalidParameter);
}

TEST(Onset, FarProbesAreDecisive) {
  OnsetOptions o;
  o.Lambda1 = kLambda1;
  o.Theta0 = 0.59;
  o.refinements = 0;
  const Mesh m = onset_mesh(square(), kKappa, o);
  EXPECT_TRUE(probe_onset(square(), m, kKappa, 2.5 * kKappa / kLambda1, o).trivial());
  EXPECT_FALSE(probe_onset(square(), m, kKappa, 0.5 * kKappa / 0.59, o).trivial());
}

TEST(StateIo, RoundTripIsExact) {
  const MinimizationOutcome r = minimize_frozen(square_mesh(), kKappa, 0.9 * kKappa / kLambda1);
  std::stringstream ss;
  save_state(ss, r.state, square_mesh());
  const GLState s = load_state(ss, square_mesh());
  EXPECT_EQ(s.kappa, r.state.kappa);
  EXPECT_EQ(s.field_H, r.state.field_H);
  ASSERT_EQ(s.psi.size(), r.state.psi.size());
  EXPECT_EQ((s.psi - r.state.psi).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(gl_energy(s, square_mesh()), gl_energy(r.state, square_mesh()));
}

TEST(StateIo, RejectsForeignMeshAndGarbage) {
  const MinimizationOutcome r = minimize_frozen(square_mesh(), kKappa, 0.9 * kKappa / kLambda1);
  std::stringstream ss;
  save_state(ss, r.state, square_mesh());
  const Mesh other = refine_uniform(square_mesh());
  EXPECT_EQ(kind_of([&] { load_state(ss, other); }), ErrorKind::kInvalidParameter);
  std::stringstream bad("{not json");
  EXPECT_EQ(kind_of([&] { load_state(bad, square_mesh()); }), ErrorKind::kInvalidParameter);
}
