#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "glcorner/critfield.hpp"
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

std::vector<CriticalFieldResult> synthetic(const std::vector<double>& kappas, double Lambda1,
                                           const std::function<double(double)>& series) {
  std::vector<CriticalFieldResult> out;
  for (double k : kappas) {
    CriticalFieldResult r;
    r.kappa = k;
    r.H_lin = k / Lambda1 * series(k);
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST(Expansion, RecoversSyntheticCoefficients) {
  const double L = 0.51;
  const auto data = synthetic({5, 7, 10, 14, 20, 28}, L,
                              [](double k) { return 1 + 2 / k - 3 / (k * k); });
  const ExpansionFit fit = fit_expansion(data, 2, L);
  ASSERT_EQ(fit.etas.size(), 2u);
  EXPECT_NEAR(fit.etas[0], 2.0, 1e-6);
  EXPECT_NEAR(fit.etas[1], -3.0, 1e-6);
  EXPECT_LE(fit.fit_residual, 1e-12);
  EXPECT_EQ(fit.lambda1, L);
}

TEST(Expansion, OrderZeroReportsRawDeviation) {
  const double L = 0.5;
  const auto data = synthetic({4, 8, 16}, L, [](double k) { return 1 + 1 / k; });
  const ExpansionFit fit = fit_expansion(data, 0, L);
  EXPECT_TRUE(fit.etas.empty());
  // |kappa/L - H| / H = (1/k) / (1 + 1/k), largest at k = 4.
  EXPECT_NEAR(fit.fit_residual, 0.25 / 1.25, 1e-14);
}

TEST(Expansion, NarrowRangeIsIllConditioned) {
  const auto data = synthetic({10, 11, 12, 13}, 0.5, [](double k) { return 1 + 1 / k; });
  EXPECT_EQ(kind_of([&] { fit_expansion(data, 1, 0.5); }), ErrorKind::kConditioningError);
}

TEST(Expansion, TooFewSamplesRejected) {
  const auto data = synthetic({4, 16}, 0.5, [](double k) { return 1 + 1 / k; });
  EXPECT_EQ(kind_of([&] { fit_expansion(data, 1, 0.5); }), ErrorKind::kInvalidParameter);
  EXPECT_EQ(kind_of([&] { fit_expansion(data, -1, 0.5); }), ErrorKind::kInvalidParameter);
}

TEST(CriticalField, RejectsBadArguments) {
  const auto sq = PolygonDomain::unit_square();
  EXPECT_EQ(kind_of([&] { solve_hc3_linear(sq, 10, 0.0, 0.51, 0.59); }),
            ErrorKind::kInvalidParameter);
  EXPECT_EQ(kind_of([&] { solve_hc3_linear(sq, 1.0, 1e-3, 0.51, 0.59); }),
            ErrorKind::kInvalidParameter);
  EXPECT_EQ(kind_of([&] { solve_hc3_sweep(sq, {}, 1e-3, 0.51, 0.59); }),
            ErrorKind::kInvalidParameter);
}

TEST(CriticalField, SquareRootLiesBetweenLeadingOrders) {
  const auto sq = PolygonDomain::unit_square();
  Mu1Options mo;
  mo.accuracy = 5e-3;
  const double Lambda1 = mu1(0.5 * M_PI, mo).value;
  const double Theta0 = fiber_theta0().theta0;
  const double kappa = 10, tol = 2e-3;
  const CriticalFieldResult r = solve_hc3_linear(sq, kappa, tol, Lambda1, Theta0);
  EXPECT_GT(r.H_lin, kappa / Theta0);
  EXPECT_LT(r.H_lin, 1.5 * kappa / Lambda1);
  EXPECT_LE(std::abs(r.residual), tol * kappa * kappa);
  EXPECT_LE(r.bracket[0], r.H_lin);
  EXPECT_GE(r.bracket[1], r.H_lin);
  EXPECT_TRUE(r.monotone);
}
