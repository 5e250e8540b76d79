#include <cmath>
#include <vector>

#include "glcorner/eigen.hpp"
#include "glcorner/error.hpp"

namespace glc {

namespace {

// Lowest eigenvalue of a symmetric tridiagonal matrix by Sturm bisection.
double lowest_tridiagonal(const std::vector<double>& d, double off, double lo, double hi) {
  auto count_below = [&](double x) {
    int c = 0;
    double q = d[0] - x;
    if (q < 0) ++c;
    for (std::size_t i = 1; i < d.size(); ++i) {
      if (q == 0) q = 1e-300;
      q = d[i] - x - off * off / q;
      if (q < 0) ++c;
    }
    return c;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// Cell-centred second-order scheme on [0, xi + 11], reflecting ghost cell at 0.
double de_gennes_fd(double xi, double dt) {
  const double L = std::max(xi, 0.0) + 11.0;
  const auto n = static_cast<std::size_t>(std::ceil(L / dt));
  std::vector<double> d(n);
  const double inv = 1.0 / (dt * dt);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * dt;
    d[i] = 2.0 * inv + (t - xi) * (t - xi);
  }
  d[0] -= inv;
  return lowest_tridiagonal(d, -inv, 0.0, 1.0 + xi * xi);
}

// Romberg table in dt^2 over a fixed halving sequence, so the result is a
// smooth function of xi. Returns the top entry and the last correction.
double romberg(double xi, double dt0, int levels, double* correction) {
  std::vector<double> row;
  for (int l = 0; l < levels; ++l) row.push_back(de_gennes_fd(xi, dt0 / std::pow(2.0, l)));
  double last = 0.0;
  for (int col = 1; col < levels; ++col) {
    const double f = std::pow(4.0, col);
    for (int l = levels - 1; l >= col; --l) {
      const double next = (f * row[l] - row[l - 1]) / (f - 1.0);
      if (l == levels - 1) last = next - row[l];
      row[l] = next;
    }
  }
  if (correction) *correction = std::abs(last);
  return row.back();
}

}  // namespace

double de_gennes_eigenvalue(double xi, double tol) {
  require(tol > 0, ErrorKind::kInvalidParameter, "tolerance must be positive");
  double corr = 0.0;
  double v = 0.0;
  for (int levels = 3; levels <= 6; ++levels) {
    v = romberg(xi, 0.04, levels, &corr);
    if (corr < tol) break;
  }
  return v;
}

FiberResult fiber_theta0(double tol) {
  require(tol > 0, ErrorKind::kInvalidParameter, "tolerance must be positive");
  // Fixed depth keeps the objective smooth in xi.
  int levels = 3;
  double corr = 0.0;
  for (; levels < 6; ++levels) {
    romberg(0.77, 0.04, levels, &corr);
    if (corr < 1e-2 * tol) break;
  }
  auto f = [&](double xi) { return romberg(xi, 0.04, levels, nullptr); };
  // Golden-section search; the minimum is quadratic so xi needs only sqrt(tol).
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.3, b = 1.3;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > std::max(1e-7, 0.1 * std::sqrt(tol))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  // The bracket is limited by rounding in f; a Newton step on central
  // differences, extrapolated in the step, locates xi0 far more precisely.
  auto newton = [&](double x, double d) {
    const double fp = f(x + d), fm = f(x - d), f0 = f(x);
    return x - d * (fp - fm) / (2.0 * (fp - 2.0 * f0 + fm));
  };
  const double x0 = 0.5 * (a + b);
  const double x1 = newton(x0, 2e-3), x2 = newton(x0, 1e-3);
  FiberResult r;
  r.xi0 = (4.0 * x2 - x1) / 3.0;
  r.theta0 = f(r.xi0);
  // Curvature of the band near the minimum is about 1.2.
  const double dx = std::abs(x2 - x1) + b - a;
  r.error = 10.0 * corr + dx * dx;
  return r;
}

}  // namespace glc
