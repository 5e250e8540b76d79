#include "glcorner/glmin.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "glcorner/error.hpp"
#include "glcorner/parallel.hpp"

namespace glc {

const char* to_string(InitKind kind) {
  switch (kind) {
    case InitKind::kZero: return "zero";
    case InitKind::kLinearMode: return "linear_mode";
    case InitKind::kRandom: return "random";
    case InitKind::kExplicit: return "explicit";
  }
  return "?";
}

InitKind init_from_string(const std::string& s) {
  for (InitKind k : {InitKind::kZero, InitKind::kLinearMode, InitKind::kRandom, InitKind::kExplicit})
    if (s == to_string(k)) return k;
  throw Error(ErrorKind::kInvalidParameter, "unknown initialization '" + s + "'");
}

namespace {

constexpr int kRestart = 50;

double dot_re(const CVec& a, const CVec& b) { return a.dot(b).real(); }  // Re a^H b

void mask(CVec& v, const std::vector<char>& fixed) {
  for (std::size_t i = 0; i < fixed.size(); ++i)
    if (fixed[i]) v[static_cast<Eigen::Index>(i)] = 0.0;
}

// Rows and columns of free nodes only.
template <class Mat>
Mat restrict_free(const Mat& A, const std::vector<int>& node_to_free, Eigen::Index n) {
  using T = typename Mat::Scalar;
  std::vector<Eigen::Triplet<T>> tr;
  for (int k = 0; k < A.outerSize(); ++k)
    for (typename Mat::InnerIterator it(A, k); it; ++it) {
      const int r = node_to_free[it.row()], c = node_to_free[it.col()];
      if (r >= 0 && c >= 0) tr.emplace_back(r, c, it.value());
    }
  Mat out(n, n);
  out.setFromTriplets(tr.begin(), tr.end());
  return out;
}

// Coefficients of the quartic term along psi + t d:
// int (a + b t + c t^2)^2 with a = |psi|^2, b = 2 Re(conj(psi) d), c = |d|^2.
std::array<double, 5> quartic_line(const Mesh& mesh, const CVec& psi, const CVec& d) {
  const auto& rule = quadrature_rule();
  std::array<double, 5> s{};
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& T = mesh.triangles[t];
    const double area = mesh.triangle_area(t);
    for (const auto& q : rule) {
      const cplx u = q.bary[0] * psi[T[0]] + q.bary[1] * psi[T[1]] + q.bary[2] * psi[T[2]];
      const cplx v = q.bary[0] * d[T[0]] + q.bary[1] * d[T[1]] + q.bary[2] * d[T[2]];
      const double a = std::norm(u), b = 2.0 * (std::conj(u) * v).real(), c = std::norm(v);
      const double w = q.weight * area;
      s[0] += w * a * a;
      s[1] += w * 2 * a * b;
      s[2] += w * (b * b + 2 * a * c);
      s[3] += w * 2 * b * c;
      s[4] += w * c * c;
    }
  }
  return s;
}

// argmin over t > 0 of e1 t + e2 t^2 + e3 t^3 + e4 t^4 (e1 < 0).
double quartic_argmin(double e1, double e2, double e3, double e4) {
  auto value = [&](double t) { return t * (e1 + t * (e2 + t * (e3 + t * e4))); };
  std::vector<double> cand;
  const double scale = std::abs(e2) + std::abs(e3) + std::abs(e4);
  if (e4 > 1e-14 * scale) {
    // Roots of the derivative through the companion matrix.
    Eigen::Matrix3d C = Eigen::Matrix3d::Zero();
    C(0, 0) = -3 * e3 / (4 * e4);
    C(0, 1) = -2 * e2 / (4 * e4);
    C(0, 2) = -e1 / (4 * e4);
    C(1, 0) = 1;
    C(2, 1) = 1;
    Eigen::EigenSolver<Eigen::Matrix3d> es(C, false);
    for (int i = 0; i < 3; ++i) {
      const auto z = es.eigenvalues()[i];
      if (std::abs(z.imag()) <= 1e-9 * (1 + std::abs(z.real())) && z.real() > 0) cand.push_back(z.real());
    }
  } else if (e2 > 0) {
    cand.push_back(-e1 / (2 * e2));
  }
  if (cand.empty()) return 1.0;
  double best = cand[0];
  for (double t : cand)
    if (value(t) < value(best)) best = t;
  return best;
}

CVec random_start(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CVec v(static_cast<Eigen::Index>(n));
  for (auto& z : v) {
    const double r = std::sqrt(u(rng)), th = 2 * M_PI * u(rng);
    z = std::polar(r, th);
  }
  return v;
}

}  // namespace

MinimizationOutcome minimize_energy(const Mesh& mesh, const SpMatC& K, const SpMatR& M,
                                    const EnergyParams& p, const DescentOptions& o,
                                    const std::vector<char>& fixed) {
  const auto n = static_cast<Eigen::Index>(mesh.node_count());
  require(K.rows() == n && M.rows() == n, ErrorKind::kInvalidParameter, "matrix size must equal node count");
  require(fixed.empty() || fixed.size() == mesh.node_count(), ErrorKind::kInvalidParameter,
          "fixed mask must cover every node");
  require(o.tol > 0 && o.max_iter > 0 && o.trivial_threshold > 0, ErrorKind::kInvalidParameter,
          "invalid descent controls");
  require(p.c2 > 0 && p.c4 > 0, ErrorKind::kInvalidParameter, "c2 and c4 must be positive");

  const RVec lumped = lumped_mass(mesh);
  const double trivial_l2 = o.trivial_threshold * std::sqrt(mesh.area());
  std::vector<int> node_to_free(mesh.node_count(), -1);
  Eigen::Index nfree = 0;
  for (std::size_t i = 0; i < mesh.node_count(); ++i)
    if (fixed.empty() || !fixed[i]) node_to_free[i] = static_cast<int>(nfree++);
  require(nfree > 0, ErrorKind::kInvalidParameter, "every node is fixed");

  MinimizationOutcome out;

  // Start.
  CVec psi = CVec::Zero(n);
  switch (o.init) {
    case InitKind::kZero: break;
    case InitKind::kRandom: psi = random_start(mesh.node_count(), o.seed); break;
    case InitKind::kExplicit:
      require(o.explicit_psi.size() == n, ErrorKind::kInvalidParameter, "explicit psi has wrong length");
      psi = o.explicit_psi;
      break;
    case InitKind::kLinearMode: {
      const SpMatC Kf = restrict_free(K, node_to_free, nfree);
      const SpMatR Mf = restrict_free(M, node_to_free, nfree);
      EigenOptions eo;
      eo.seed = o.seed;
      const SpectralResult sr = smallest_eigenpairs(Kf, Mf, 1, eo);
      out.lambda1 = sr.eigenvalues[0];
      CVec u = CVec::Zero(n);
      for (std::size_t i = 0; i < mesh.node_count(); ++i)
        if (node_to_free[i] >= 0) u[static_cast<Eigen::Index>(i)] = sr.eigenvectors[0][node_to_free[i]];
      u /= l2_norm(u, M);
      // E(t u) = t^2 (lambda1 - c2) + (c4 / 2) t^4 ||u||_4^4.
      const double t2 = std::max(0.0, (p.c2 - out.lambda1) / (p.c4 * l4_norm4(u, mesh)));
      psi = std::sqrt(t2) * u;
      out.trial_energy = -0.5 * (p.c2 - out.lambda1) * t2;
      break;
    }
  }
  mask(psi, fixed);

  // Preconditioner K + c2 M on the free nodes, identity on the fixed ones.
  std::vector<Eigen::Triplet<cplx>> pt;
  for (int k = 0; k < K.outerSize(); ++k)
    for (SpMatC::InnerIterator it(K, k); it; ++it)
      if (node_to_free[it.row()] >= 0 && node_to_free[it.col()] >= 0) pt.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < M.outerSize(); ++k)
    for (SpMatR::InnerIterator it(M, k); it; ++it)
      if (node_to_free[it.row()] >= 0 && node_to_free[it.col()] >= 0)
        pt.emplace_back(it.row(), it.col(), p.c2 * it.value());
  for (std::size_t i = 0; i < mesh.node_count(); ++i)
    if (node_to_free[i] < 0) pt.emplace_back(i, i, 1.0);
  SpMatC P(n, n);
  P.setFromTriplets(pt.begin(), pt.end());
  Eigen::SimplicialLLT<SpMatC, Eigen::Lower, Eigen::AMDOrdering<int>> llt(P);
  require(llt.info() == Eigen::Success, ErrorKind::kSolverError, "preconditioner factorization failed");

  auto energy = [&](const CVec& v) { return energy_with(K, M, mesh, v, p); };
  double E = energy(psi);
  out.energy_history.push_back(E);
  CVec g, z, d, g_prev;
  double gz_prev = 0;
  bool converged = false;
  int it = 0;
  for (; it < o.max_iter; ++it) {
    g = gradient_with(K, M, mesh, psi, p);
    mask(g, fixed);
    out.grad_norm = dual_norm(g, lumped);
    const double l2 = l2_norm(psi, M);
    if (l2 <= trivial_l2 || out.grad_norm <= o.tol * p.c2 * l2) {
      converged = true;
      break;
    }
    z = llt.solve(g);
    mask(z, fixed);
    const double gz = dot_re(g, z);
    // Polak-Ribiere+, restarted every kRestart steps: without restarts the
    // direction loses conjugacy once well separated corner states decouple.
    double beta = 0;
    if (it > 0 && it % kRestart != 0 && gz_prev > 0) beta = std::max(0.0, (gz - dot_re(g_prev, z)) / gz_prev);
    d = it > 0 ? CVec(-z + beta * d) : CVec(-z);
    double slope = 2 * dot_re(g, d);
    if (!(slope < 0)) {
      d = -z;
      slope = -2 * gz;
    }
    // Exact line minimization of the quartic.
    const CVec Ad = K * d - p.c2 * (M * d);
    const double q1 = 2 * dot_re(psi, Ad), q2 = dot_re(d, Ad);
    const auto s4 = quartic_line(mesh, psi, d);
    const double h = 0.5 * p.c4;
    const double e1 = q1 + h * s4[1], e2 = q2 + h * s4[2], e3 = h * s4[3], e4 = h * s4[4];
    double t = quartic_argmin(e1, e2, e3, e4);
    CVec trial = psi + t * d;
    double Et = energy(trial);
    int halvings = 0;
    while (!(Et <= E + 1e-13 * std::max(1.0, std::abs(E))) && halvings < 40) {
      t *= 0.5;
      trial = psi + t * d;
      Et = energy(trial);
      ++halvings;
    }
    if (halvings == 40) break;  // no decrease along a descent direction: rounding floor
    psi = std::move(trial);
    E = Et;
    out.energy_history.push_back(E);
    g_prev = g;
    gz_prev = gz;
  }
  out.iterations = it;
  out.state.psi = psi;
  out.energy = E;
  out.l2 = l2_norm(psi, M);
  out.trivial_flag = out.l2 <= trivial_l2;
  if (out.trivial_flag) {
    // Declared normal: report (0, F) itself, not the decaying remainder.
    out.state.psi.setZero();
    out.energy = 0.0;
    out.l2 = 0.0;
  }
  out.max_abs = out.state.psi.size() ? out.state.psi.cwiseAbs().maxCoeff() : 0.0;
  if (!converged) {
    // A stalled line search at the rounding floor of the energy counts as
    // converged when the gradient is within 100x of the target.
    if (!(it < o.max_iter && out.grad_norm <= 100 * o.tol * p.c2 * std::max(out.l2, trivial_l2)))
      throw MinimizationFailure("descent did not reach the gradient tolerance", out);
  }
  return out;
}

MinimizationOutcome minimize_frozen(const Mesh& mesh, double kappa, double H, const GaugeField& gauge,
                                    const DescentOptions& o) {
  require(kappa > 0 && H > 0, ErrorKind::kInvalidParameter, "kappa and H must be positive");
  const EnergyParams p = gl_params(kappa, H);
  const MagneticSystem sys = assemble(mesh, p.b, gauge);
  MinimizationOutcome out = minimize_energy(mesh, sys.K, sys.M, p, o);
  out.state.potential = gauge;
  out.state.kappa = kappa;
  out.state.field_H = H;
  return out;
}

MinimizationOutcome minimize_frozen_multistart(const Mesh& mesh, double kappa, double H,
                                               const GaugeField& gauge, const DescentOptions& o) {
  DescentOptions d = o;
  d.init = InitKind::kLinearMode;
  MinimizationOutcome best = minimize_frozen(mesh, kappa, H, gauge, d);
  d.init = InitKind::kRandom;
  MinimizationOutcome other = minimize_frozen(mesh, kappa, H, gauge, d);
  if (other.energy < best.energy) {
    other.lambda1 = best.lambda1;
    other.trial_energy = best.trial_energy;
    return other;
  }
  return best;
}

LeveledEnergy frozen_energy_levels(const PolygonDomain& poly, double kappa, double H, int levels,
                                   const DescentOptions& o) {
  require(kappa > 0 && H > 0, ErrorKind::kInvalidParameter, "kappa and H must be positive");
  require(levels >= 0, ErrorKind::kInvalidParameter, "levels must be nonnegative");
  const double b = kappa * H;
  const GaugeField gauge = make_polygon_gauge(poly, b);
  LeveledEnergy r;
  r.mesh = make_field_mesh(poly, b, {});
  for (int l = 0; l <= levels; ++l) {
    if (l > 0) r.mesh = refine_uniform(r.mesh);
    r.outcome = minimize_frozen_multistart(r.mesh, kappa, H, gauge, o);
    r.by_level.push_back(r.outcome.energy);
    r.nodes.push_back(r.mesh.node_count());
  }
  r.energy = r.by_level.back();
  if (levels > 0) {
    const double e1 = r.by_level[levels - 1], e2 = r.by_level[levels];
    r.energy = e2 + (e2 - e1) / 3.0;
    r.error = std::abs(r.energy - e2);
  }
  return r;
}

// ---- coupled -------------------------------------------------------------------

namespace {

struct TriGeom {
  double area;
  Vec2 grad[3];
};

TriGeom tri_geom(const Mesh& m, std::size_t t) {
  const auto& T = m.triangles[t];
  const Vec2 p0 = m.nodes[T[0]], p1 = m.nodes[T[1]], p2 = m.nodes[T[2]];
  const double twice = cross(p1 - p0, p2 - p0);
  return {0.5 * twice,
          {(1.0 / twice) * Vec2{p1.y - p2.y, p2.x - p1.x}, (1.0 / twice) * Vec2{p2.y - p0.y, p0.x - p2.x},
           (1.0 / twice) * Vec2{p0.y - p1.y, p1.x - p0.x}}};
}

// Field terms of a nodal box field: int (curl a)^2, int (div a)^2, int |grad a|^2.
std::array<double, 3> field_terms(const Mesh& box, const std::vector<Vec2>& a) {
  std::array<double, 3> s{};
  for (std::size_t t = 0; t < box.triangle_count(); ++t) {
    const auto& T = box.triangles[t];
    const TriGeom g = tri_geom(box, t);
    double axx = 0, axy = 0, ayx = 0, ayy = 0;
    for (int i = 0; i < 3; ++i) {
      axx += a[T[i]].x * g.grad[i].x;
      axy += a[T[i]].x * g.grad[i].y;
      ayx += a[T[i]].y * g.grad[i].x;
      ayy += a[T[i]].y * g.grad[i].y;
    }
    s[0] += g.area * (ayx - axy) * (ayx - axy);
    s[1] += g.area * (axx + ayy) * (axx + ayy);
    s[2] += g.area * (axx * axx + axy * axy + ayx * ayx + ayy * ayy);
  }
  return s;
}

}  // namespace

MinimizationOutcome minimize_coupled(const BoxMesh& box, double kappa, double H, const CoupledOptions& o) {
  require(o.tol > 0 && o.max_sweeps > 0, ErrorKind::kInvalidParameter, "invalid sweep controls");
  require(kappa > 0 && H > 0, ErrorKind::kInvalidParameter, "kappa and H must be positive");
  const EnergyParams p = gl_params(kappa, H);
  const double b = p.b;
  const Mesh& dom = box.domain;
  const Mesh& bm = box.box;
  const std::size_t nb = bm.node_count();
  const auto outer = bm.nodes_with_tag(BoundaryTag::kArtificial);
  std::vector<int> free_of(nb, -1);
  int nfree = 0;
  for (std::size_t i = 0; i < nb; ++i)
    if (!outer[i]) free_of[i] = nfree++;

  // Box Dirichlet form (scalar P1), shared by both components.
  std::vector<Eigen::Triplet<double>> lt;
  for (std::size_t t = 0; t < bm.triangle_count(); ++t) {
    const auto& T = bm.triangles[t];
    const TriGeom g = tri_geom(bm, t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int r = free_of[T[i]], c = free_of[T[j]];
        if (r >= 0 && c >= 0) lt.emplace_back(r, c, g.area * dot(g.grad[i], g.grad[j]));
      }
  }

  std::vector<Vec2> a(nb, Vec2{0, 0});
  auto domain_gauge = [&] {
    std::vector<Vec2> nod(dom.node_count());
    for (std::size_t i = 0; i < nod.size(); ++i) nod[i] = a[box.domain_to_box[i]];
    return o.base.with_correction(std::move(nod));
  };

  MinimizationOutcome out;
  DescentOptions dopt = o.psi;
  double prev = std::numeric_limits<double>::infinity();
  std::vector<double> objective;
  const auto& rule = quadrature_rule();
  for (int sweep = 0; sweep < o.max_sweeps; ++sweep) {
    // psi-step.
    const GaugeField gauge = domain_gauge();
    const MagneticSystem sys = assemble(dom, b, gauge);
    out = minimize_energy(dom, sys.K, sys.M, p, dopt, {});
    const CVec& psi = out.state.psi;
    dopt.init = InitKind::kExplicit;
    dopt.explicit_psi = psi;
    if (out.trivial_flag) {
      // No current: the A-step returns a = 0.
      std::fill(a.begin(), a.end(), Vec2{0, 0});
      objective.push_back(out.energy);
      break;
    }

    // A-step: (W + L) a_c = f_c / b with W = int |psi|^2 phi_i phi_j and
    // f_c = int Re(conj(psi) (-i grad - b F) psi)_c phi_i over the domain.
    std::vector<Eigen::Triplet<double>> wt = lt;
    Eigen::VectorXd fx = Eigen::VectorXd::Zero(nfree), fy = Eigen::VectorXd::Zero(nfree);
    for (std::size_t t = 0; t < dom.triangle_count(); ++t) {
      const auto& T = dom.triangles[t];
      const TriGeom g = tri_geom(dom, t);
      cplx gx = 0, gy = 0;
      for (int i = 0; i < 3; ++i) {
        gx += g.grad[i].x * psi[T[i]];
        gy += g.grad[i].y * psi[T[i]];
      }
      for (const auto& q : rule) {
        const Vec2 x = q.bary[0] * dom.nodes[T[0]] + q.bary[1] * dom.nodes[T[1]] + q.bary[2] * dom.nodes[T[2]];
        const cplx v = q.bary[0] * psi[T[0]] + q.bary[1] * psi[T[1]] + q.bary[2] * psi[T[2]];
        const Vec2 F = o.base.base(x);
        const cplx px = cplx(0, -1) * gx - b * F.x * v, py = cplx(0, -1) * gy - b * F.y * v;
        const double jx = (std::conj(v) * px).real(), jy = (std::conj(v) * py).real();
        const double w = q.weight * g.area, m2 = std::norm(v);
        for (int i = 0; i < 3; ++i) {
          const int r = free_of[box.domain_to_box[T[i]]];
          if (r < 0) continue;
          fx[r] += w * jx * q.bary[i] / b;
          fy[r] += w * jy * q.bary[i] / b;
          for (int j = 0; j < 3; ++j) {
            const int c = free_of[box.domain_to_box[T[j]]];
            if (c >= 0) wt.emplace_back(r, c, w * m2 * q.bary[i] * q.bary[j]);
          }
        }
      }
    }
    SpMatR S(nfree, nfree);
    S.setFromTriplets(wt.begin(), wt.end());
    Eigen::SimplicialLLT<SpMatR> chol(S);
    if (chol.info() != Eigen::Success)
      throw Error(ErrorKind::kSolverError, "field equation factorization failed");
    const Eigen::VectorXd ax = chol.solve(fx), ay = chol.solve(fy);
    if (chol.info() != Eigen::Success || !ax.allFinite() || !ay.allFinite())
      throw Error(ErrorKind::kSolverError, "field equation solve failed");
    for (std::size_t i = 0; i < nb; ++i)
      a[i] = free_of[i] >= 0 ? Vec2{ax[free_of[i]], ay[free_of[i]]} : Vec2{0, 0};

    // Penalized objective after the sweep.
    const GaugeField g2 = domain_gauge();
    const MagneticSystem s2 = assemble(dom, b, g2);
    const auto ft = field_terms(bm, a);
    const double gl = energy_with(s2.K, s2.M, dom, psi, p) + b * b * ft[0];
    const double obj = gl + b * b * ft[1];
    objective.push_back(obj);
    out.energy = gl;
    if (obj > prev + 1e-10 * std::max(1.0, std::abs(prev)))
      throw Error(ErrorKind::kNumericalInstability, "alternating sweep increased the objective");
    const bool done = prev - obj <= o.tol;
    prev = obj;
    if (done) break;
    if (sweep + 1 == o.max_sweeps) {
      out.sweep_objective = objective;
      out.sweeps = static_cast<int>(objective.size());
      throw MinimizationFailure("alternating minimization did not settle", out);
    }
  }

  // The loop ends on an A-step, so psi and a form a consistent pair.
  out.sweep_objective = objective;
  out.sweeps = static_cast<int>(objective.size());
  const GaugeField gauge = domain_gauge();
  const auto ft = field_terms(bm, a);
  out.state.potential = gauge;
  out.state.kappa = kappa;
  out.state.field_H = H;
  out.state.field_energy = b * b * ft[0];
  out.energy = gl_energy(out.state, dom);
  out.box_field = a;
  out.curl_l2 = std::sqrt(ft[0]);
  out.div_l2 = std::sqrt(ft[1]);
  out.grad_a_l2 = std::sqrt(ft[2]);
  return out;
}

// ---- sector model --------------------------------------------------------------

namespace {

// Slope of log max|psi| over radial bins in [r0, r1].
double radial_decay(const Mesh& mesh, const CVec& psi, double r0, double r1, double scale) {
  const double peak = psi.cwiseAbs().maxCoeff();
  if (!(peak > 0)) return 0.0;
  const int bins = 16;
  std::vector<double> best(bins, 0.0);
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    const double r = norm(mesh.nodes[i]) / scale;
    if (r < r0 || r >= r1) continue;
    const int k = std::min(bins - 1, static_cast<int>((r - r0) / (r1 - r0) * bins));
    best[k] = std::max(best[k], std::abs(psi[static_cast<Eigen::Index>(i)]));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int k = 0; k < bins; ++k) {
    if (!(best[k] > 1e-12 * peak)) continue;
    const double x = r0 + (k + 0.5) * (r1 - r0) / bins, y = std::log(best[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 3) return 0.0;
  return -(m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

SectorModelResult sector_model(double alpha, double mu1p, double mu2p, double R, double tol,
                               const SectorModelOptions& o) {
  require(alpha > 0 && alpha < 2 * M_PI, ErrorKind::kInvalidParameter, "alpha must lie in (0, 2pi)");
  require(mu2p > 0 && mu1p > 0, ErrorKind::kInvalidParameter, "mu1 and mu2 must be positive");
  require(R > 0 && tol > 0 && o.scale > 0, ErrorKind::kInvalidParameter, "R, tol and scale must be positive");
  require(mu1p < fiber_theta0(1e-9).theta0, ErrorKind::kInvalidParameter, "mu1 must lie below Theta0");
  require(o.radius_fractions.size() >= 3 && o.refinements >= 0, ErrorKind::kInvalidParameter,
          "need three radii and a nonnegative refinement count");

  const double L = o.scale, L2 = L * L;
  const EnergyParams p{1.0 / L2, mu1p / L2, mu2p / L2};
  SectorModelResult res;
  res.alpha = alpha;
  res.mu1_param = mu1p;
  res.mu2_param = mu2p;
  for (double f : o.radius_fractions) res.radii.push_back(f * R);

  // Unit-scale mesh, mapped by L so that the scaled problem is an exact image.
  SectorMeshOptions mo;
  mo.edge_layer = o.layer_width;
  mo.h_max = o.h_max;
  for (double r : res.radii)
    if (r < R * (1 - 1e-12)) mo.interior_arcs.push_back(r);
  Mesh base = make_sector_mesh(SectorDomain{alpha, R, o.grading}, o.h_layer, mo);
  if (L != 1.0) base = scale_mesh(base, L);
  const GaugeField gauge = make_sector_gauge(alpha, o.gauge, p.b);

  auto solve = [&](const Mesh& mesh, double r, const DescentOptions& d) {
    std::vector<char> fixed(mesh.node_count());
    for (std::size_t i = 0; i < mesh.node_count(); ++i)
      fixed[i] = norm(mesh.nodes[i]) > r * L * (1 - 1e-9);
    const MagneticSystem sys = assemble(mesh, p.b, gauge);
    return minimize_energy(mesh, sys.K, sys.M, p, d, fixed);
  };

  DescentOptions d = o.descent;
  for (double r : res.radii) res.energy_by_R.push_back(solve(base, r, d).energy);
  const TruncationFit tail = extrapolate_truncation(res.radii, res.energy_by_R, false, tol);

  Mesh mesh = base;
  MinimizationOutcome fin = solve(mesh, R, d);
  res.energy_by_h.push_back(fin.energy);
  for (int level = 1; level <= o.refinements; ++level) {
    mesh = refine_uniform(mesh);
    fin = solve(mesh, R, d);
    res.energy_by_h.push_back(fin.energy);
  }
  const std::size_t nh = res.energy_by_h.size();
  double value_h = res.energy_by_h.back(), h_err = 0;
  if (nh >= 2) {
    const double corr = (res.energy_by_h[nh - 1] - res.energy_by_h[nh - 2]) / 3.0;
    value_h += corr;
    h_err = std::abs(corr);
    if (nh >= 3) {
      const double prev = res.energy_by_h[nh - 2] + (res.energy_by_h[nh - 2] - res.energy_by_h[nh - 3]) / 3.0;
      h_err = std::abs(value_h - prev);
    }
  }
  res.raw_energy = res.energy_by_h.back();
  res.energy = value_h + (tail.limit - res.energy_by_R.back());
  res.error = h_err + tail.error;
  res.psi0 = fin.state.psi;
  res.mesh = mesh;
  res.max_abs = fin.max_abs;
  res.trivial = fin.trivial_flag;
  if (res.trivial) {
    res.energy = 0.0;
    res.error = 0.0;
    return res;
  }
  // Mass beyond 0.85 R.
  const RVec lm = lumped_mass(mesh);
  double all = 0, outer = 0;
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    const double m = lm[static_cast<Eigen::Index>(i)] * std::norm(res.psi0[static_cast<Eigen::Index>(i)]);
    all += m;
    if (norm(mesh.nodes[i]) > 0.85 * R * L) outer += m;
  }
  res.outer_mass = outer / all;
  res.decay_rate = radial_decay(mesh, res.psi0, 0.25 * R, 0.8 * R, L);
  if (res.outer_mass > o.boundary_mass)
    throw Error(ErrorKind::kAccuracyNotMet, "truncation radius too small: mass reaches the arc");
  if (res.error > tol) throw Error(ErrorKind::kAccuracyNotMet, "sector energy extrapolation missed the tolerance");
  return res;
}

// ---- onset ----------------------------------------------------------------------

Mesh onset_mesh(const PolygonDomain& poly, double kappa, const OnsetOptions& o) {
  require(o.Lambda1 > 0, ErrorKind::kInvalidParameter, "Lambda1 must be positive");
  Mesh m = make_field_mesh(poly, kappa * kappa / o.Lambda1, o.spectrum);
  for (int i = 0; i < o.refinements; ++i) m = refine_uniform(m);
  return m;
}

OnsetProbe probe_onset(const PolygonDomain& poly, const Mesh& mesh, double kappa, double H,
                       const OnsetOptions& o) {
  OnsetProbe pr;
  pr.H = H;
  const GaugeField gauge =
      o.spectrum.patched_gauge ? make_polygon_gauge(poly, kappa * H) : GaugeField::standard();
  const EnergyParams p = gl_params(kappa, H);
  const MagneticSystem sys = assemble(mesh, p.b, gauge);
  auto trivial = [&](InitKind init) {
    DescentOptions d = o.descent;
    d.init = init;
    try {
      return minimize_energy(mesh, sys.K, sys.M, p, d).trivial_flag;
    } catch (const MinimizationFailure& f) {
      // Out of budget: still above zero energy means the state is draining
      // toward the normal state (nontrivial minimizers have negative energy).
      pr.budget_exhausted = true;
      return f.best().energy >= 0.0;
    }
  };
  pr.trivial_linear = trivial(InitKind::kLinearMode);
  if (pr.trivial_linear) pr.trivial_random = trivial(InitKind::kRandom);
  return pr;
}

OnsetResult detect_onset(const PolygonDomain& poly, double kappa, double tol_H, const OnsetOptions& o) {
  require(kappa > 0 && tol_H > 0, ErrorKind::kInvalidParameter, "kappa and tol_H must be positive");
  require(o.Lambda1 > 0 && o.Theta0 > 0, ErrorKind::kInvalidParameter, "spectral constants must be positive");
  require(o.scan_points >= 2, ErrorKind::kInvalidParameter, "need at least two scan points");
  const Mesh mesh = onset_mesh(poly, kappa, o);
  OnsetResult res;
  auto probe = [&](const std::vector<double>& Hs) {
    std::vector<OnsetProbe> out(Hs.size());
    parallel_for(Hs.size(), o.jobs, [&](std::size_t i) { out[i] = probe_onset(poly, mesh, kappa, Hs[i], o); });
    for (const auto& pr : out) {
      res.probe_H.push_back(pr.H);
      res.probe_trivial.push_back(pr.trivial());
      if (pr.budget_exhausted)
        res.warnings.push_back("descent budget exhausted at H = " + std::to_string(pr.H));
    }
    res.probes += static_cast<int>(Hs.size());
    return out;
  };

  double lo = 0.5 * kappa / o.Theta0, hi = 2.0 * kappa / o.Lambda1;
  int points = o.scan_points;
  for (int restart = 0;; ++restart) {
    std::vector<double> Hs;
    for (int i = 0; i < points; ++i) Hs.push_back(lo + (hi - lo) * i / (points - 1));
    const auto pr = probe(Hs);
    // Last switch from superconducting to normal.
    int k = points - 1;
    if (!pr[k].trivial()) throw Error(ErrorKind::kNoRoot, "superconducting at the top of the search interval");
    while (k > 0 && pr[k - 1].trivial()) --k;
    if (k == 0) throw Error(ErrorKind::kNoRoot, "normal already at the bottom of the search interval");
    bool flips = false;
    for (int i = 0; i + 1 < k; ++i) flips |= pr[i].trivial() != pr[i + 1].trivial();
    lo = Hs[k - 1];
    hi = Hs[k];
    if (!flips) break;
    res.monotone = false;
    res.warnings.push_back("onset predicate is not monotone on the scan grid");
    if (restart >= o.max_restarts) break;
    // Finer grid from the first normal probe up to the last switch.
    int first = 0;
    while (!pr[first].trivial()) ++first;
    lo = Hs[std::max(0, first - 1)];
    points = 2 * points - 1;
  }
  while (hi - lo > tol_H) {
    const double m = 0.5 * (lo + hi);
    if (probe({m})[0].trivial())
      hi = m;
    else
      lo = m;
  }
  res.bracket[0] = lo;
  res.bracket[1] = hi;
  res.H_star = 0.5 * (lo + hi);
  return res;
}

}  // namespace glc
