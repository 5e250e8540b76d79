#include "glcorner/assembly.hpp"

#include <cmath>
#include <ostream>

#include "glcorner/error.hpp"

namespace glc {

const std::array<QuadPoint, 6>& quadrature_rule() {
  static const std::array<QuadPoint, 6> rule = [] {
    const double a1 = 0.445948490915965, b1 = 1.0 - 2.0 * a1, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, b2 = 1.0 - 2.0 * a2, w2 = 0.109951743655322;
    return std::array<QuadPoint, 6>{{{{b1, a1, a1}, w1},
                                     {{a1, b1, a1}, w1},
                                     {{a1, a1, b1}, w1},
                                     {{b2, a2, a2}, w2},
                                     {{a2, b2, a2}, w2},
                                     {{a2, a2, b2}, w2}}};
  }();
  return rule;
}

namespace {

struct ElementGeometry {
  double area;
  Vec2 grad[3];
};

ElementGeometry element_geometry(const Mesh& mesh, std::size_t t) {
  const auto& T = mesh.triangles[t];
  const Vec2 p0 = mesh.nodes[T[0]], p1 = mesh.nodes[T[1]], p2 = mesh.nodes[T[2]];
  const double twice = cross(p1 - p0, p2 - p0);
  ElementGeometry g;
  g.area = 0.5 * twice;
  // grad phi_i = perp(opposite edge) / (2 area), pointing toward node i.
  g.grad[0] = (1.0 / twice) * Vec2{p1.y - p2.y, p2.x - p1.x};
  g.grad[1] = (1.0 / twice) * Vec2{p2.y - p0.y, p0.x - p2.x};
  g.grad[2] = (1.0 / twice) * Vec2{p0.y - p1.y, p1.x - p0.x};
  return g;
}

}  // namespace

CVec MagneticSystem::expand(const CVec& x) const {
  CVec out = CVec::Zero(static_cast<Eigen::Index>(node_count));
  for (std::size_t i = 0; i < dof_to_node.size(); ++i) out[dof_to_node[i]] = x[static_cast<Eigen::Index>(i)];
  return out;
}

CVec MagneticSystem::restrict_to_dofs(const CVec& nodal) const {
  CVec out(static_cast<Eigen::Index>(dof_to_node.size()));
  for (std::size_t i = 0; i < dof_to_node.size(); ++i) out[static_cast<Eigen::Index>(i)] = nodal[dof_to_node[i]];
  return out;
}

MagneticSystem assemble(const Mesh& mesh, double b, const GaugeField& gauge, ArcCondition arc,
                        const std::vector<char>& zero_nodes) {
  require(std::isfinite(b) && b >= 0, ErrorKind::kInvalidParameter, "field strength must be >= 0");
  if (gauge.kind() == GaugeField::Kind::kExplicit || !gauge.nodal().empty())
    require(gauge.nodal().size() == mesh.node_count(), ErrorKind::kInvalidParameter,
            "gauge must be defined on every node");
  const std::size_t n = mesh.node_count();
  std::vector<int> node_to_dof(n, 0);
  if (arc == ArcCondition::kEssentialZero) {
    const auto art = mesh.nodes_with_tag(BoundaryTag::kArtificial);
    for (std::size_t i = 0; i < n; ++i) node_to_dof[i] = art[i] ? -1 : 0;
  }
  if (!zero_nodes.empty()) {
    require(zero_nodes.size() == n, ErrorKind::kInvalidParameter, "zero mask must cover every node");
    for (std::size_t i = 0; i < n; ++i)
      if (zero_nodes[i]) node_to_dof[i] = -1;
  }
  MagneticSystem sys;
  sys.b = b;
  sys.mesh_ref = mesh.fingerprint();
  sys.gauge = gauge;
  sys.arc = arc;
  sys.node_count = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (node_to_dof[i] < 0) continue;
    node_to_dof[i] = static_cast<int>(sys.dof_to_node.size());
    sys.dof_to_node.push_back(static_cast<int>(i));
  }
  const auto& rule = quadrature_rule();
  std::vector<Eigen::Triplet<cplx>> kt;
  std::vector<Eigen::Triplet<double>> mt;
  kt.reserve(9 * mesh.triangle_count());
  mt.reserve(9 * mesh.triangle_count());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& T = mesh.triangles[t];
    const ElementGeometry g = element_geometry(mesh, t);
    // Moments of A against the basis: int A phi_i and int |A|^2 phi_i phi_j.
    Vec2 aphi[3] = {};
    double a2[3][3] = {};
    for (const auto& q : rule) {
      const Vec2 A = gauge.eval(mesh, t, q.bary);
      const double w = q.weight * g.area;
      const double A2 = dot(A, A);
      for (int i = 0; i < 3; ++i) {
        aphi[i] += (w * q.bary[i]) * A;
        for (int j = 0; j < 3; ++j) a2[i][j] += w * A2 * q.bary[i] * q.bary[j];
      }
    }
    cplx ke[3][3];
    for (int i = 0; i < 3; ++i) {
      ke[i][i] = cplx(g.area * dot(g.grad[i], g.grad[i]) + b * b * a2[i][i], 0.0);
      for (int j = i + 1; j < 3; ++j) {
        const double re = g.area * dot(g.grad[i], g.grad[j]) + b * b * a2[i][j];
        const double im = b * (dot(aphi[i], g.grad[j]) - dot(aphi[j], g.grad[i]));
        ke[i][j] = cplx(re, im);
        ke[j][i] = std::conj(ke[i][j]);
      }
    }
    for (int i = 0; i < 3; ++i) {
      const int di = node_to_dof[T[i]];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = node_to_dof[T[j]];
        if (dj < 0) continue;
        kt.emplace_back(di, dj, ke[i][j]);
        mt.emplace_back(di, dj, g.area / 12.0 * (i == j ? 2.0 : 1.0));
      }
    }
  }
  const auto m = static_cast<Eigen::Index>(sys.dof_to_node.size());
  sys.K.resize(m, m);
  sys.K.setFromTriplets(kt.begin(), kt.end());
  sys.M.resize(m, m);
  sys.M.setFromTriplets(mt.begin(), mt.end());
  // Summation order can differ between (i,j) and (j,i); restore exact symmetry.
  SpMatC Kh = sys.K.adjoint();
  sys.K = 0.5 * (sys.K + Kh);
  SpMatR Mt = sys.M.transpose();
  sys.M = 0.5 * (sys.M + Mt);
  return sys;
}

SpMatR assemble_mass(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> mt;
  mt.reserve(9 * mesh.triangle_count());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& T = mesh.triangles[t];
    const double a = mesh.triangle_area(t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mt.emplace_back(T[i], T[j], a / 12.0 * (i == j ? 2.0 : 1.0));
  }
  const auto n = static_cast<Eigen::Index>(mesh.node_count());
  SpMatR M(n, n);
  M.setFromTriplets(mt.begin(), mt.end());
  return M;
}

RVec lumped_mass(const Mesh& mesh) {
  RVec m = RVec::Zero(static_cast<Eigen::Index>(mesh.node_count()));
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const double a = mesh.triangle_area(t) / 3.0;
    for (int k : mesh.triangles[t]) m[k] += a;
  }
  return m;
}

SpMatR assemble_weighted_mass(const Mesh& mesh, const std::function<double(Vec2)>& wfun) {
  const auto& rule = quadrature_rule();
  std::vector<Eigen::Triplet<double>> mt;
  mt.reserve(9 * mesh.triangle_count());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& T = mesh.triangles[t];
    const double area = mesh.triangle_area(t);
    double me[3][3] = {};
    for (const auto& q : rule) {
      const Vec2 x = q.bary[0] * mesh.nodes[T[0]] + q.bary[1] * mesh.nodes[T[1]] +
                     q.bary[2] * mesh.nodes[T[2]];
      const double w = q.weight * area * wfun(x);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) me[i][j] += w * q.bary[i] * q.bary[j];
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mt.emplace_back(T[i], T[j], me[i][j]);
  }
  const auto n = static_cast<Eigen::Index>(mesh.node_count());
  SpMatR M(n, n);
  M.setFromTriplets(mt.begin(), mt.end());
  return M;
}

void write_coo(const SpMatC& A, std::ostream& out) {
  const auto old = out.precision(17);
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMatC::InnerIterator it(A, k); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag()
          << '\n';
  out.precision(old);
}

// ---- GL energy ------------------------------------------------------------------

EnergyParams gl_params(double kappa, double H) {
  require(kappa > 0 && H > 0, ErrorKind::kInvalidParameter, "kappa and H must be positive");
  return {kappa * H, kappa * kappa, kappa * kappa};
}

double l4_norm4(const CVec& psi, const Mesh& mesh) {
  require(static_cast<std::size_t>(psi.size()) == mesh.node_count(), ErrorKind::kInvalidParameter,
          "psi length must equal node count");
  const auto& rule = quadrature_rule();
  double s = 0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& T = mesh.triangles[t];
    const double area = mesh.triangle_area(t);
    for (const auto& q : rule) {
      const cplx v = q.bary[0] * psi[T[0]] + q.bary[1] * psi[T[1]] + q.bary[2] * psi[T[2]];
      const double m2 = std::norm(v);
      s += q.weight * area * m2 * m2;
    }
  }
  return s;
}

double l4_norm(const CVec& psi, const Mesh& mesh) { return std::pow(l4_norm4(psi, mesh), 0.25); }

CVec cubic_load(const CVec& psi, const Mesh& mesh) {
  const auto& rule = quadrature_rule();
  CVec out = CVec::Zero(psi.size());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& T = mesh.triangles[t];
    const double area = mesh.triangle_area(t);
    for (const auto& q : rule) {
      const cplx v = q.bary[0] * psi[T[0]] + q.bary[1] * psi[T[1]] + q.bary[2] * psi[T[2]];
      const cplx f = (q.weight * area * std::norm(v)) * v;
      for (int i = 0; i < 3; ++i) out[T[i]] += q.bary[i] * f;
    }
  }
  return out;
}

double l2_norm(const CVec& psi, const SpMatR& M) {
  return std::sqrt(std::max(0.0, (psi.adjoint() * (M * psi)).value().real()));
}

double dual_norm(const CVec& g, const RVec& lumped) {
  double s = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i) s += std::norm(g[i]) / lumped[i];
  return std::sqrt(s);
}

double energy_with(const SpMatC& K, const SpMatR& M, const Mesh& mesh, const CVec& psi,
                   const EnergyParams& p) {
  const double kin = (psi.adjoint() * (K * psi)).value().real();
  const double mass = (psi.adjoint() * (M * psi)).value().real();
  return kin - p.c2 * mass + 0.5 * p.c4 * l4_norm4(psi, mesh);
}

CVec gradient_with(const SpMatC& K, const SpMatR& M, const Mesh& mesh, const CVec& psi,
                   const EnergyParams& p) {
  CVec g = K * psi - p.c2 * (M * psi);
  g += p.c4 * cubic_load(psi, mesh);
  return g;
}

double gl_energy(const GLState& state, const Mesh& mesh) {
  require(static_cast<std::size_t>(state.psi.size()) == mesh.node_count(),
          ErrorKind::kInvalidParameter, "psi length must equal node count");
  const EnergyParams p = gl_params(state.kappa, state.field_H);
  const MagneticSystem sys = assemble(mesh, p.b, state.potential);
  return energy_with(sys.K, sys.M, mesh, state.psi, p) + state.field_energy;
}

CVec gl_gradient(const GLState& state, const Mesh& mesh) {
  require(static_cast<std::size_t>(state.psi.size()) == mesh.node_count(),
          ErrorKind::kInvalidParameter, "psi length must equal node count");
  const EnergyParams p = gl_params(state.kappa, state.field_H);
  const MagneticSystem sys = assemble(mesh, p.b, state.potential);
  return gradient_with(sys.K, sys.M, mesh, state.psi, p);
}

std::vector<double> element_kinetic_density(const Mesh& mesh, const CVec& psi, double b,
                                            const GaugeField& gauge) {
  const auto& rule = quadrature_rule();
  std::vector<double> out(mesh.triangle_count());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto& T = mesh.triangles[t];
    const ElementGeometry g = element_geometry(mesh, t);
    cplx gx = 0, gy = 0;
    for (int i = 0; i < 3; ++i) {
      gx += g.grad[i].x * psi[T[i]];
      gy += g.grad[i].y * psi[T[i]];
    }
    double s = 0;
    for (const auto& q : rule) {
      const cplx v = q.bary[0] * psi[T[0]] + q.bary[1] * psi[T[1]] + q.bary[2] * psi[T[2]];
      const Vec2 A = gauge.eval(mesh, t, q.bary);
      const cplx px = cplx(0, -1) * gx - b * A.x * v;
      const cplx py = cplx(0, -1) * gy - b * A.y * v;
      s += q.weight * g.area * (std::norm(px) + std::norm(py));
    }
    out[t] = s;
  }
  return out;
}

}  // namespace glc
