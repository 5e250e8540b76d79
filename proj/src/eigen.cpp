#include "glcorner/eigen.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "glcorner/error.hpp"
#include "glcorner/parallel.hpp"

namespace glc {

namespace {

GaugeField sector_gauge(double alpha, const Mu1Options& o) {
  SectorGauge type = o.gauge;
  // Narrow sectors: the blended edge gauge grows like r / alpha.
  if (o.auto_gauge) type = alpha < 0.35 * M_PI ? SectorGauge::kAngular : SectorGauge::kEdgeBlend;
  return make_sector_gauge(alpha, type, 1.0);
}

Mesh sector_mesh(double alpha, double R, const Mu1Options& o, const std::vector<double>& arcs = {}) {
  SectorDomain s{alpha, R, o.grading};
  SectorMeshOptions mo;
  for (double r : arcs)
    if (r < R * (1 - 1e-12)) mo.interior_arcs.push_back(r);
  mo.edge_layer = o.layer_width;
  mo.h_max = o.h_max;
  return make_sector_mesh(s, o.h_layer, mo);
}

double lowest(const MagneticSystem& sys, double hint, int block = 0) {
  EigenOptions eo;
  eo.hint = hint;
  eo.block = block;
  return smallest_eigenpairs(sys, 1, 1e-10, eo).eigenvalues[0];
}

// lambda_1 with the nodes at |x| >= r eliminated, for each r (ascending).
// The mesh carries an interior arc at each r, so every truncation is exact.
std::vector<double> nested_lambdas(const Mesh& mesh, double alpha, const std::vector<double>& radii,
                                   const Mu1Options& o) {
  const GaugeField g = sector_gauge(alpha, o);
  std::vector<double> out;
  double hint = std::numeric_limits<double>::quiet_NaN();
  for (double r : radii) {
    std::vector<char> zero(mesh.node_count());
    for (std::size_t i = 0; i < mesh.node_count(); ++i) zero[i] = norm(mesh.nodes[i]) > r * (1 - 1e-9);
    const auto sys = assemble(mesh, 1.0, g, o.arc, zero);
    hint = lowest(sys, hint);
    out.push_back(hint);
  }
  return out;
}

// Limit of c + d e^{-aR} through three equally spaced samples; NaN when the
// differences do not contract.
double aitken(double a, double b, double c) {
  const double d1 = a - b, d2 = b - c;
  if (std::abs(d2) < 1e-13) return c - std::max(d2, 0.0);
  if (!(d1 > d2 && d2 > 0)) return std::numeric_limits<double>::quiet_NaN();
  const double r = d2 / d1;
  return c - d2 * r / (1.0 - r);
}

// Limit c of c + d / R^2 + e / R^3 through three samples.
double inverse_power_limit(const double* R, const double* lam) {
  Eigen::Matrix3d A;
  Eigen::Vector3d y;
  for (int i = 0; i < 3; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = 1.0 / (R[i] * R[i]);
    A(i, 2) = 1.0 / (R[i] * R[i] * R[i]);
    y[i] = lam[i];
  }
  return A.colPivHouseholderQr().solve(y)[0];
}

}  // namespace

TruncationFit extrapolate_truncation(const std::vector<double>& R, const std::vector<double>& lam,
                                     bool algebraic, double accuracy) {
  require(R.size() == lam.size() && R.size() >= 3, ErrorKind::kInvalidParameter,
          "need at least three truncation samples");
  for (std::size_t i = 1; i < lam.size(); ++i) {
    require(R[i] > R[i - 1], ErrorKind::kInvalidParameter, "radii must be ascending");
    if (lam[i] > lam[i - 1] + std::max(1e-9, 1e-3 * accuracy))
      throw Error(ErrorKind::kAccuracyNotMet, "truncation sequence is not monotone");
  }
  const std::size_t n = lam.size();
  if (algebraic) {
    // Edge modes with no corner below them: algebraic approach in 1/R.
    const double l2 = inverse_power_limit(&R[n - 3], &lam[n - 3]);
    if (n < 4) return {l2, std::abs(l2 - lam[n - 1])};
    const double l1 = inverse_power_limit(&R[n - 4], &lam[n - 4]);
    return {l2, std::abs(l2 - l1)};
  }
  const double a2 = aitken(lam[n - 3], lam[n - 2], lam[n - 1]);
  if (!std::isfinite(a2)) return {lam[n - 1], std::numeric_limits<double>::infinity()};
  double err = std::abs(lam[n - 1] - a2);
  if (n >= 4) {
    const double a1 = aitken(lam[n - 4], lam[n - 3], lam[n - 2]);
    err = std::isfinite(a1) ? std::max(err, std::abs(a1 - a2)) : std::max(err, 2.0 * err);
  }
  return {a2, err};
}

Mu1Result mu1(double alpha, const Mu1Options& o) {
  require(alpha > 0 && alpha < 2 * M_PI, ErrorKind::kInvalidParameter, "alpha must lie in (0, 2pi)");
  require(o.accuracy > 0, ErrorKind::kInvalidParameter, "accuracy target must be positive");
  require(o.h_layer > 0 && o.layer_width > 0 && o.refinements >= 2 && o.R_h > 0,
          ErrorKind::kInvalidParameter, "invalid mesh controls");
  if (!o.radii.empty()) {
    require(o.radii.size() >= 3, ErrorKind::kInvalidParameter, "need at least three radii");
    const double step = o.radii[1] - o.radii[0];
    for (std::size_t i = 1; i < o.radii.size(); ++i)
      require(std::abs(o.radii[i] - o.radii[i - 1] - step) < 1e-9 * o.radii.back() && step > 0,
              ErrorKind::kInvalidParameter, "radii must be ascending and equally spaced");
  }
  const bool algebraic = alpha >= M_PI - 1e-9;

  Mu1Result res;
  res.alpha = alpha;

  // Truncation: nested radii on one coarse mesh, so that all samples share
  // the same discretization error.
  double Rmax = o.radii.empty() ? (algebraic ? 48.0 : 24.0) : o.radii.back();
  Mesh base;
  TruncationFit tail{};
  for (int grow = 0;; ++grow) {
    res.radii = o.radii;
    if (res.radii.empty())
      for (double f : {0.55, 0.7, 0.85, 1.0}) res.radii.push_back(f * Rmax);
    std::vector<double> arcs = res.radii;
    if (std::isfinite(o.R_h)) arcs.push_back(o.R_h);
    base = sector_mesh(alpha, Rmax, o, arcs);
    res.lambda_by_R = nested_lambdas(base, alpha, res.radii, o);
    tail = extrapolate_truncation(res.radii, res.lambda_by_R, algebraic, o.accuracy);
    if (tail.error <= 0.25 * o.accuracy || !o.radii.empty() || grow == 4) break;
    Rmax *= 1.6;
  }
  if (!(tail.error <= 0.5 * o.accuracy))
    throw Error(ErrorKind::kAccuracyNotMet, "truncation radius extrapolation did not settle");
  res.R = res.radii.back();
  res.R_error = tail.error;

  // Mesh size: Richardson in h^2 on red refinements at radius R_h.
  const double Rh = std::min(o.R_h, res.R);
  const double lam_base_Rh = Rh < res.R ? nested_lambdas(base, alpha, {Rh}, o)[0] : res.lambda_by_R.back();
  const double tail_shift = tail.limit - lam_base_Rh;

  Mesh mesh = Rh < res.R ? sector_mesh(alpha, Rh, o) : base;
  const GaugeField g = sector_gauge(alpha, o);
  std::vector<double> rich;
  double hint = lam_base_Rh;
  for (int level = 0; level <= o.refinements; ++level) {
    if (level > 0) mesh = refine_uniform(mesh);
    const auto sys = assemble(mesh, 1.0, g, o.arc);
    hint = lowest(sys, hint);
    res.lambda_by_h.push_back(hint);
    res.nodes = mesh.node_count();
    if (level > 0) rich.push_back((4.0 * hint - res.lambda_by_h[level - 1]) / 3.0);
    if (rich.size() >= 2) {
      res.h_error = std::abs(rich.back() - rich[rich.size() - 2]);
      if (res.h_error <= 0.5 * o.accuracy) break;
    }
  }
  res.h = o.h_layer / std::pow(2.0, static_cast<double>(res.lambda_by_h.size() - 1));
  const double value_h = rich.back();
  // The tail is taken from the coarse mesh; its relative error is that of the
  // coarse eigenvalue.
  const double rel = std::abs(res.lambda_by_h.front() - value_h) / std::abs(value_h);
  res.value = value_h + tail_shift;
  res.error = res.h_error + res.R_error + rel * std::abs(tail_shift);
  if (res.error > o.accuracy)
    throw Error(ErrorKind::kAccuracyNotMet, "mesh extrapolation did not reach the target");
  return res;
}

Theta0Result theta0(const Mu1Options& options) {
  Theta0Result r;
  r.sector = mu1(M_PI, options);
  r.fiber = fiber_theta0(1e-10);
  r.value = r.sector.value;
  r.error = r.sector.error;
  r.consistent = std::abs(r.sector.value - r.fiber.theta0) <= r.sector.error + r.fiber.error;
  return r;
}

ScalingResult scaling_check(double alpha, const std::vector<double>& b_list, double R, double h) {
  require(!b_list.empty(), ErrorKind::kInvalidParameter, "b list is empty");
  for (double b : b_list) require(b > 0, ErrorKind::kInvalidParameter, "b must be positive");
  SectorDomain s{alpha, R, 0.25};
  const Mesh base = make_sector_mesh(s, h);
  ScalingResult out;
  for (double b : b_list) {
    const Mesh m = scale_mesh(base, 1.0 / std::sqrt(b));
    const auto sys = assemble(m, b, GaugeField::standard(), ArcCondition::kEssentialZero);
    out.b.push_back(b);
    out.ratio.push_back(smallest_eigenpairs(sys, 1, 1e-12).eigenvalues[0] / b);
  }
  for (double r : out.ratio)
    out.deviation = std::max(out.deviation, std::abs(r - out.ratio[0]) / std::abs(out.ratio[0]));
  return out;
}

IndependentScalingResult scaling_check_independent(double alpha, const std::vector<double>& b_list,
                                                   double R, double h) {
  require(!b_list.empty(), ErrorKind::kInvalidParameter, "b list is empty");
  IndependentScalingResult out;
  for (double b : b_list) {
    require(b > 0, ErrorKind::kInvalidParameter, "b must be positive");
    const double l = 1.0 / std::sqrt(b);
    SectorDomain s{alpha, R * l, 0.25};
    SectorMeshOptions mo;
    Mesh m = make_sector_mesh(s, h * l, mo);
    const auto gauge = GaugeField::standard();
    const double l0 =
        smallest_eigenpairs(assemble(m, b, gauge, ArcCondition::kEssentialZero), 1, 1e-11).eigenvalues[0];
    m = refine_uniform(m);
    const double l1 =
        smallest_eigenpairs(assemble(m, b, gauge, ArcCondition::kEssentialZero), 1, 1e-11).eigenvalues[0];
    out.scaling.b.push_back(b);
    out.scaling.ratio.push_back(l1 / b);
    out.error_estimate = std::max(out.error_estimate, std::abs(l1 - l0) / (3.0 * b));
  }
  for (double r : out.scaling.ratio)
    out.scaling.deviation =
        std::max(out.scaling.deviation, std::abs(r - out.scaling.ratio[0]) / std::abs(out.scaling.ratio[0]));
  // The estimate is absolute on lambda/b; express it relative to the ratio.
  out.error_estimate = 2.0 * out.error_estimate / std::abs(out.scaling.ratio[0]);
  return out;
}

// ---- polygons -------------------------------------------------------------------

Mu1Result Mu1Cache::get(double alpha) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.lower_bound(alpha - 1e-12);
    if (it != cache_.end() && std::abs(it->first - alpha) <= 1e-12) return it->second;
  }
  Mu1Result r = mu1(alpha, options_);
  std::lock_guard<std::mutex> lock(mutex_);
  cache_.emplace(alpha, r);
  return r;
}

CornerSpectrum corner_spectrum(const std::vector<double>& angles, Mu1Cache& cache, int jobs) {
  require(!angles.empty(), ErrorKind::kInvalidParameter, "corner set is empty");
  std::vector<double> distinct;
  for (double a : angles) {
    require(a > 0 && a < 2 * M_PI, ErrorKind::kInvalidParameter, "corner angle out of range");
    bool seen = false;
    for (double d : distinct) seen = seen || std::abs(d - a) <= 1e-12;
    if (!seen) distinct.push_back(a);
  }
  distinct.push_back(M_PI);  // Theta_0
  std::vector<Mu1Result> mus(distinct.size());
  parallel_for(distinct.size(), jobs, [&](std::size_t i) { mus[i] = cache.get(distinct[i]); });
  const Mu1Result th = mus.back();

  CornerSpectrum cs;
  cs.theta0 = th.value;
  cs.theta0_error = th.error;
  std::vector<std::pair<double, int>> items;
  for (std::size_t s = 0; s < angles.size(); ++s) {
    std::size_t k = 0;
    while (std::abs(distinct[k] - angles[s]) > 1e-12) ++k;
    cs.mu_by_corner.push_back(mus[k].value);
    cs.err_by_corner.push_back(mus[k].error);
    items.emplace_back(mus[k].value, static_cast<int>(s));
    if (mus[k].value + mus[k].error >= th.value - th.error) cs.assumption_ok = false;
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [v, s] : items) {
    cs.lambdas.push_back(v);
    cs.corner_of.push_back(s);
    if (v < cs.theta0) cs.K_omega = static_cast<int>(cs.lambdas.size());
  }
  return cs;
}

CornerSpectrum corner_spectrum(PolygonDomain& poly, Mu1Cache& cache, int jobs) {
  require(poly.size() > 0, ErrorKind::kInvalidParameter, "corner set is empty");
  CornerSpectrum cs = corner_spectrum(poly.angles(), cache, jobs);
  if (!cs.assumption_ok) poly.set_assumption_flag(false);
  return cs;
}

SizingFunction field_sizing(const PolygonDomain& poly, double B, const PolygonSpectrumOptions& o) {
  require(B > 0, ErrorKind::kInvalidParameter, "field strength must be positive");
  const double l = 1.0 / std::sqrt(B);
  GradedSizing g;
  g.corners = poly.vertices();
  const auto& v = poly.vertices();
  for (std::size_t i = 0; i < v.size(); ++i)
    g.edges.push_back({v[i], v[(i + 1) % v.size()], BoundaryTag::kPhysical, static_cast<int>(i)});
  g.h_corner = o.grading * o.h_layer * l;
  g.corner_slope = 0.25;
  g.h_layer = o.h_layer * l;
  g.layer_width = o.layer_width * l;
  g.zone_radius = o.corner_zone * l;
  g.growth = o.growth;
  g.h_max = std::max(g.h_layer, poly.diameter() / 8.0);
  return g;
}

Mesh make_field_mesh(const PolygonDomain& poly, double B, const PolygonSpectrumOptions& o) {
  PolygonMeshOptions mo;
  mo.sizing = field_sizing(poly, B, o);
  return make_polygon_mesh(poly, o.h_layer / std::sqrt(B), o.grading, mo);
}

namespace {

GaugeField polygon_gauge(const PolygonDomain& poly, double B, const PolygonSpectrumOptions& o) {
  return o.patched_gauge ? make_polygon_gauge(poly, B) : GaugeField::standard();
}

}  // namespace

Lambda1Result lambda1_polygon(const PolygonDomain& poly, double B, const PolygonSpectrumOptions& o) {
  require(B > 0, ErrorKind::kInvalidParameter, "field strength must be positive");
  return lambda1_polygon(poly, make_field_mesh(poly, B, o), B, o);
}

Lambda1Result lambda1_polygon(const PolygonDomain& poly, const Mesh& base, double B,
                              const PolygonSpectrumOptions& o) {
  require(B > 0, ErrorKind::kInvalidParameter, "field strength must be positive");
  require(o.refinements >= 1, ErrorKind::kInvalidParameter, "need at least one refinement");
  Mesh mesh = base;
  const GaugeField g = polygon_gauge(poly, B, o);
  Lambda1Result r;
  r.B = B;
  double hint = std::numeric_limits<double>::quiet_NaN();
  const int block = static_cast<int>(poly.size()) + 3;
  std::vector<double> rich;
  for (int level = 0; level <= o.refinements; ++level) {
    if (level > 0) mesh = refine_uniform(mesh);
    EigenOptions eo;
    eo.hint = hint;
    eo.block = block;
    hint = smallest_eigenpairs(assemble(mesh, B, g), 1, o.tol, eo).eigenvalues[0];
    r.by_level.push_back(hint);
    if (level > 0) rich.push_back((4.0 * hint - r.by_level[level - 1]) / 3.0);
  }
  r.nodes = mesh.node_count();
  r.value = rich.back();
  // With two extrapolants their difference bounds the error of the older one;
  // with one, the size of the correction is all there is.
  r.error = rich.size() >= 2 ? std::abs(rich.back() - rich[rich.size() - 2])
                             : std::abs(r.by_level.back() - r.by_level[r.by_level.size() - 2]) / 3.0;
  return r;
}

SpectralCurve lambda1_curve(const PolygonDomain& poly, const std::vector<double>& B_list,
                            const PolygonSpectrumOptions& o, int jobs) {
  require(!B_list.empty(), ErrorKind::kInvalidParameter, "B list is empty");
  for (std::size_t i = 0; i < B_list.size(); ++i) {
    require(B_list[i] > 0, ErrorKind::kInvalidParameter, "B must be positive");
    if (i > 0) require(B_list[i] > B_list[i - 1], ErrorKind::kInvalidParameter, "B list must increase");
  }
  std::vector<Lambda1Result> res(B_list.size());
  parallel_for(B_list.size(), jobs, [&](std::size_t i) { res[i] = lambda1_polygon(poly, B_list[i], o); });
  SpectralCurve c;
  for (const auto& r : res) c.samples.push_back({r.B, r.value, r.error});
  const auto& top = c.samples.back();
  if (top.error > 0.02 * std::abs(top.lambda1))
    throw Error(ErrorKind::kAccuracyNotMet, "mesh does not resolve the largest field strength");
  const std::size_t n = c.samples.size();
  for (std::size_t i = 0; n >= 2 && i < n; ++i) {
    const std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 == n ? i : i + 1;
    c.slopes.push_back((c.samples[b].lambda1 - c.samples[a].lambda1) / (c.samples[b].B - c.samples[a].B));
  }
  return c;
}

UbGapResult ub_gap(const PolygonDomain& poly, double B, double delta, double M0, double Lambda1,
                   double Theta0, bool zero_potential, const PolygonSpectrumOptions& o) {
  require(B > 0 && M0 > 0, ErrorKind::kInvalidParameter, "B and M0 must be positive");
  require(std::isfinite(delta), ErrorKind::kInvalidParameter, "delta must be finite");
  const Mesh mesh = make_field_mesh(poly, B, o);
  const auto sys = assemble(mesh, B, polygon_gauge(poly, B, o));
  const double reach = M0 / std::sqrt(B);
  const auto& v = poly.vertices();
  auto U = [&](Vec2 x) {
    if (zero_potential) return 0.0;
    double dc = std::numeric_limits<double>::infinity();
    for (const Vec2& c : v) dc = std::min(dc, norm(x - c));
    if (dc <= reach) return B * (Lambda1 - delta);
    if (poly.boundary_distance(x) <= reach) return B * (Theta0 - delta);
    return B * (1.0 - delta);
  };
  const double umax = std::max({0.0, B * (Lambda1 - delta), B * (Theta0 - delta), B * (1.0 - delta)});
  const SpMatR W = assemble_weighted_mass(mesh, U);
  const SpMatC K = sys.K - W.cast<cplx>();
  EigenOptions eo;
  eo.shift = zero_potential ? -1e-2 * B : -1.05 * umax - 1e-2 * B;
  eo.block = static_cast<int>(poly.size()) + 3;
  eo.tol = o.tol;
  UbGapResult r;
  r.value = smallest_eigenpairs(K, sys.M, 1, eo).eigenvalues[0];
  r.nodes = mesh.node_count();
  if (!zero_potential) {
    EigenOptions e1;
    e1.block = eo.block;
    r.lambda1 = smallest_eigenpairs(sys, 1, o.tol, e1).eigenvalues[0];
  } else {
    r.lambda1 = r.value;
  }
  return r;
}

}  // namespace glc
