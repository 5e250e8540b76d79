#include "glcorner/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace glc {

namespace {

struct Integrals {
  double weighted = 0.0;
  double near = 0.0;
  double total = 0.0;
};

// Quadrature of e^{w(x)} (|psi|^2 + |p psi|^2 / b) and of |psi|^2 over the
// near zone, with w and the zone test evaluated at each quadrature point.
Integrals integrate(const Mesh& mesh, const GLState& s, const std::function<double(Vec2)>& exponent,
                    const std::function<bool(Vec2)>& near) {
  const double b = s.kappa * s.field_H;
  const auto& rule = quadrature_rule();
  Integrals r;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& T = mesh.triangles[t];
    const Vec2 p0 = mesh.nodes[T[0]], p1 = mesh.nodes[T[1]], p2 = mesh.nodes[T[2]];
    const double twice = cross(p1 - p0, p2 - p0);
    const Vec2 grad[3] = {(1.0 / twice) * Vec2{p1.y - p2.y, p2.x - p1.x},
                          (1.0 / twice) * Vec2{p2.y - p0.y, p0.x - p2.x},
                          (1.0 / twice) * Vec2{p0.y - p1.y, p1.x - p0.x}};
    const double area = 0.5 * twice;
    cplx gx = 0, gy = 0;
    for (int i = 0; i < 3; ++i) {
      gx += grad[i].x * s.psi[T[i]];
      gy += grad[i].y * s.psi[T[i]];
    }
    for (const auto& q : rule) {
      const Vec2 x = q.bary[0] * p0 + q.bary[1] * p1 + q.bary[2] * p2;
      const cplx v = q.bary[0] * s.psi[T[0]] + q.bary[1] * s.psi[T[1]] + q.bary[2] * s.psi[T[2]];
      const Vec2 A = s.potential.eval(mesh, t, q.bary);
      const cplx px = cplx(0, -1) * gx - b * A.x * v;
      const cplx py = cplx(0, -1) * gy - b * A.y * v;
      const double w = q.weight * area;
      const double m = std::norm(v);
      r.total += w * m;
      r.weighted += w * std::exp(exponent(x)) * (m + (std::norm(px) + std::norm(py)) / b);
      if (near(x)) r.near += w * m;
    }
  }
  return r;
}

// Slope of log(max |psi|) per bin of scaled distance, sign flipped. Nodes
// below 1e-12 of the global maximum are ignored.
std::pair<double, std::size_t> fit_rate(const CVec& psi, const std::vector<double>& scaled) {
  const double top = psi.cwiseAbs().maxCoeff();
  if (!(top > 0)) return {0.0, 0};
  const double width = 0.5;
  double smax = 0;
  for (double s : scaled) smax = std::max(smax, s);
  const std::size_t nb = static_cast<std::size_t>(smax / width) + 1;
  std::vector<double> best(nb, 0.0);
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    const auto k = static_cast<std::size_t>(scaled[i] / width);
    best[k] = std::max(best[k], std::abs(psi[static_cast<Eigen::Index>(i)]));
  }
  // Start at the bin holding the maximum; the profile is flat before it.
  std::size_t first = 0;
  for (std::size_t k = 0; k < nb; ++k)
    if (best[k] > best[first]) first = k;
  std::vector<double> x, y;
  for (std::size_t k = first; k < nb; ++k)
    if (best[k] > 1e-12 * top) {
      x.push_back((k + 0.5) * width);
      y.push_back(std::log(best[k]));
    }
  if (x.size() < 3) return {0.0, x.size()};
  return {-linear_trend(x, y).slope, x.size()};
}

void require_nontrivial(const Mesh& mesh, const MinimizationOutcome& o) {
  require(static_cast<std::size_t>(o.state.psi.size()) == mesh.node_count(), ErrorKind::kInvalidParameter,
          "state does not belong to the mesh");
  require(o.state.kappa > 0 && o.state.field_H > 0, ErrorKind::kInvalidParameter,
          "state parameters must be positive");
  if (o.trivial_flag || o.state.psi.cwiseAbs().maxCoeff() == 0.0)
    throw Error(ErrorKind::kUndefinedRatio, "trivial order parameter");
}

AgmonReport finish(const Integrals& in, double epsilon, double M) {
  if (!(in.near > 0)) throw Error(ErrorKind::kUndefinedRatio, "no mass in the near zone");
  AgmonReport r;
  r.epsilon = epsilon;
  r.M = M;
  r.weighted_mass = in.weighted;
  r.near_mass = in.near;
  r.total_mass = in.total;
  r.ratio = in.weighted / in.near;
  return r;
}

std::vector<Vec2> corner_points(const Mesh& mesh, const std::vector<int>& ids) {
  std::vector<Vec2> pts;
  for (int id : ids) {
    const auto it = mesh.corner_nodes.find(id);
    require(it != mesh.corner_nodes.end(), ErrorKind::kInvalidParameter, "corner id not present in the mesh");
    pts.push_back(mesh.nodes[it->second]);
  }
  return pts;
}

double nearest(const std::vector<Vec2>& pts, Vec2 x, int* which = nullptr) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double e = norm(x - pts[k]);
    if (e < d) {
      d = e;
      if (which) *which = static_cast<int>(k);
    }
  }
  return d;
}

}  // namespace

AgmonReport agmon_corner(const Mesh& mesh, const MinimizationOutcome& o, const std::vector<int>& sigma_prime,
                         double epsilon, double M) {
  require(!sigma_prime.empty(), ErrorKind::kInvalidParameter, "corner set is empty");
  require(epsilon >= 0 && M > 0, ErrorKind::kInvalidParameter, "need epsilon >= 0 and M > 0");
  require_nontrivial(mesh, o);
  const std::vector<Vec2> pts = corner_points(mesh, sigma_prime);
  const double sb = std::sqrt(o.state.kappa * o.state.field_H);
  const Integrals in = integrate(
      mesh, o.state, [&](Vec2 x) { return epsilon * sb * nearest(pts, x); },
      [&](Vec2 x) { return sb * nearest(pts, x) <= M; });
  AgmonReport r = finish(in, epsilon, M);
  std::vector<double> scaled(mesh.node_count());
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = sb * nearest(pts, mesh.nodes[i]);
  std::tie(r.fitted_rate, r.fit_bins) = fit_rate(o.state.psi, scaled);
  return r;
}

AgmonReport agmon_boundary(const Mesh& mesh, const MinimizationOutcome& o, double epsilon, double M) {
  require(epsilon >= 0 && M > 0, ErrorKind::kInvalidParameter, "need epsilon >= 0 and M > 0");
  require(o.state.field_H > o.state.kappa, ErrorKind::kInvalidParameter, "boundary estimate needs H > kappa");
  require_nontrivial(mesh, o);
  const DistanceTargets bd = DistanceTargets::physical_boundary();
  const double sb = std::sqrt(o.state.kappa * o.state.field_H);
  const Integrals in = integrate(
      mesh, o.state, [&](Vec2 x) { return 2 * epsilon * sb * point_distance(mesh, bd, x); },
      [&](Vec2 x) { return sb * point_distance(mesh, bd, x) <= M; });
  AgmonReport r = finish(in, epsilon, M);
  std::vector<double> scaled = distance_field(mesh, bd);
  for (double& s : scaled) s *= sb;
  std::tie(r.fitted_rate, r.fit_bins) = fit_rate(o.state.psi, scaled);
  return r;
}

std::vector<AgmonReport> agmon_grid(const Mesh& mesh, const MinimizationOutcome& o,
                                    const std::vector<int>& sigma_prime, const std::vector<double>& epsilons,
                                    const std::vector<double>& Ms) {
  require(!epsilons.empty() && !Ms.empty(), ErrorKind::kInvalidParameter, "empty (epsilon, M) grid");
  std::vector<AgmonReport> out;
  for (double e : epsilons)
    for (double M : Ms) out.push_back(agmon_corner(mesh, o, sigma_prime, e, M));
  return out;
}

WeakDecayReport weak_decay(const Mesh& mesh, const MinimizationOutcome& o) {
  const double k = o.state.kappa, H = o.state.field_H;
  require(k * (H - k) >= 0.5, ErrorKind::kInvalidParameter, "weak decay needs kappa (H - kappa) >= 1/2");
  require_nontrivial(mesh, o);
  const DistanceTargets bd = DistanceTargets::physical_boundary();
  const double s = std::sqrt(k * (H - k));
  const Integrals in = integrate(
      mesh, o.state, [](Vec2) { return 0.0; }, [&](Vec2 x) { return s * point_distance(mesh, bd, x) <= 1.0; });
  if (!(in.near > 0)) throw Error(ErrorKind::kUndefinedRatio, "no mass in the boundary layer");
  WeakDecayReport r;
  r.total_mass = in.total;
  r.layer_mass = in.near;
  r.ratio = in.total / in.near;
  r.scaled_total = in.total * s;
  return r;
}

std::vector<int> select_corners(const CornerSpectrum& spectrum, double mu) {
  std::vector<int> ids;
  for (std::size_t s = 0; s < spectrum.mu_by_corner.size(); ++s)
    if (spectrum.mu_by_corner[s] <= mu) ids.push_back(static_cast<int>(s));
  return ids;
}

CornerMassProfile corner_mass_profile(const Mesh& mesh, const MinimizationOutcome& o,
                                      const CornerSpectrum& spectrum, double mu, double M) {
  require(M > 0, ErrorKind::kInvalidParameter, "M must be positive");
  require(static_cast<std::size_t>(o.state.psi.size()) == mesh.node_count(), ErrorKind::kInvalidParameter,
          "state does not belong to the mesh");
  const std::size_t nc = spectrum.mu_by_corner.size();
  require(nc > 0, ErrorKind::kInvalidParameter, "corner spectrum is empty");
  CornerMassProfile p;
  p.M = M;
  p.fraction.assign(nc, 0.0);
  p.sigma_prime = select_corners(spectrum, mu);
  std::vector<int> all(nc);
  for (std::size_t s = 0; s < nc; ++s) all[s] = static_cast<int>(s);
  const std::vector<Vec2> pts = corner_points(mesh, all);
  const double radius = M / o.state.kappa;

  const auto& rule = quadrature_rule();
  double total = 0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& T = mesh.triangles[t];
    const double area = mesh.triangle_area(t);
    for (const auto& q : rule) {
      const Vec2 x = q.bary[0] * mesh.nodes[T[0]] + q.bary[1] * mesh.nodes[T[1]] + q.bary[2] * mesh.nodes[T[2]];
      const cplx v = q.bary[0] * o.state.psi[T[0]] + q.bary[1] * o.state.psi[T[1]] + q.bary[2] * o.state.psi[T[2]];
      const double m = q.weight * area * std::norm(v);
      total += m;
      int which = -1;
      if (nearest(pts, x, &which) <= radius) p.fraction[which] += m;
    }
  }
  if (o.trivial_flag || !(total > 0)) {
    p.fraction.assign(nc, 0.0);
    p.trivial = true;
    return p;
  }
  double inside = 0;
  for (double& f : p.fraction) {
    f /= total;
    inside += f;
  }
  p.off_corner = std::max(0.0, 1.0 - inside);
  for (int s : p.sigma_prime) p.sigma_prime_fraction += p.fraction[s];
  return p;
}

EnergyReport energy_vs_corner_sum(double gl_energy, const PolygonDomain& poly,
                                  const std::vector<SectorModelResult>& sectors, double mu) {
  require(mu > 0, ErrorKind::kInvalidParameter, "mu must be positive");
  EnergyReport r;
  r.gl_energy = gl_energy;
  r.mu = mu;
  const double mtol = 1e-12 * std::max(1.0, mu);
  for (double a : poly.angles()) {
    const auto it = std::find_if(sectors.begin(), sectors.end(), [&](const SectorModelResult& s) {
      return std::abs(s.alpha - a) <= 1e-9 && std::abs(s.mu1_param - mu) <= mtol &&
             std::abs(s.mu2_param - mu) <= mtol;
    });
    require(it != sectors.end(), ErrorKind::kInvalidParameter, "no sector energy for a corner angle");
    r.corner_sum += it->energy;
    r.corner_sum_error += it->error;
  }
  r.degenerate = r.corner_sum == 0.0;
  r.rel_gap = r.degenerate ? std::abs(gl_energy) : std::abs(gl_energy - r.corner_sum) / std::abs(r.corner_sum);
  return r;
}

SanityReport minimizer_sanity(const Mesh& mesh, const MinimizationOutcome& o, double tol, double maxp_tol) {
  require(static_cast<std::size_t>(o.state.psi.size()) == mesh.node_count(), ErrorKind::kInvalidParameter,
          "state does not belong to the mesh");
  const GLState& s = o.state;
  const double l2 = l2_norm(s.psi, assemble_mass(mesh));
  const auto sys = assemble(mesh, s.kappa * s.field_H, s.potential);
  const CVec x = sys.restrict_to_dofs(s.psi);
  const double kin = std::sqrt(std::max(0.0, x.dot(sys.K * x).real()));
  const double l4sq = std::pow(l4_norm(s.psi, mesh), 2);
  const double maxp = s.psi.size() ? s.psi.cwiseAbs().maxCoeff() : 0.0;

  SanityReport r;
  auto add = [&](const char* name, double lhs, double rhs, double slack) {
    SanityItem it{name, lhs, rhs, lhs <= rhs + slack};
    r.all_hold = r.all_hold && it.holds;
    r.items.push_back(it);
  };
  add("max-modulus", maxp, 1.0, maxp_tol);
  add("l4-below-l2", l4sq, l2, tol * std::max(1.0, l2));
  add("kinetic-below-kappa-l2", kin, s.kappa * l2, tol * std::max(1.0, s.kappa * l2));
  add("field-below-l2", s.field_H * o.curl_l2, l2, tol * std::max(1.0, l2));
  add("energy-nonpositive", o.energy, 0.0, tol * std::max(1.0, std::abs(o.energy)));
  r.field_constant = o.curl_l2 > 0 ? o.grad_a_l2 / o.curl_l2 : std::numeric_limits<double>::quiet_NaN();
  return r;
}

Trend linear_trend(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::kInvalidParameter, "need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0, ErrorKind::kInvalidParameter, "abscissae must not all coincide");
  Trend t;
  t.slope = sxy / sxx;
  if (x.size() > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - my - t.slope * (x[i] - mx);
      rss += e * e;
    }
    t.stderr_slope = std::sqrt(rss / (n - 2) / sxx);
    t.positive = t.slope > 2 * t.stderr_slope;
  } else {
    t.stderr_slope = std::numeric_limits<double>::infinity();
  }
  return t;
}

}  // namespace glc
