#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "glcorner/geometry.hpp"

namespace glc {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using SpMatC = Eigen::SparseMatrix<cplx>;
using SpMatR = Eigen::SparseMatrix<double>;

/// Degree-4 symmetric rule on the reference triangle (barycentric points,
/// weights summing to one).
struct QuadPoint {
  std::array<double, 3> bary;
  double weight;
};
const std::array<QuadPoint, 6>& quadrature_rule();

/// Vector potential with unit curl (for STANDARD_F and the analytic gauges)
/// plus an optional nodal P1 part.
class GaugeField {
 public:
  enum class Kind { kStandardF, kExplicit, kAnalytic };

  GaugeField() = default;
  static GaugeField standard();
  /// Purely nodal field, interpolated linearly on each triangle.
  static GaugeField explicit_nodal(std::vector<Vec2> values);
  /// Closed-form field; the caller guarantees curl = 1.
  static GaugeField analytic(std::function<Vec2(Vec2)> f);

  Kind kind() const { return kind_; }
  /// Adds a nodal P1 correction on top of the base field.
  GaugeField with_correction(std::vector<Vec2> nodal) const;
  const std::vector<Vec2>& nodal() const { return nodal_; }

  Vec2 base(Vec2 x) const;
  /// Value inside triangle t at barycentric coordinates `bary`.
  Vec2 eval(const Mesh& mesh, std::size_t t, const std::array<double, 3>& bary) const;
  /// Value at node i (base plus nodal part).
  Vec2 at_node(const Mesh& mesh, std::size_t i) const;

 private:
  Kind kind_ = Kind::kStandardF;
  std::function<Vec2(Vec2)> f_;
  std::vector<Vec2> nodal_;
};

/// F(x) = (-x2, x1) / 2.
inline Vec2 standard_f(Vec2 x) { return {-0.5 * x.y, 0.5 * x.x}; }

/// Gauges with slowly varying phase for corner problems at field strength b.
/// Along each straight edge they reduce to the Landau gauge shifted so that
/// the edge ground state is real; near a vertex the two edge gauges are
/// blended in angle. All have curl exactly 1.
enum class SectorGauge { kStandard, kEdgeBlend, kAngular };
GaugeField make_sector_gauge(double alpha, SectorGauge type, double b = 1.0);

/// Corner-patched gauge on a polygon: each corner carries the blended sector
/// gauge, patches are joined with smooth weights. Unavoidable flux mismatch
/// is pushed to the edge midpoints.
GaugeField make_polygon_gauge(const PolygonDomain& poly, double b);

enum class ArcCondition { kNatural, kEssentialZero };

struct MagneticSystem {
  SpMatC K;  // restricted to free dofs
  SpMatR M;
  double b = 0.0;
  std::uint64_t mesh_ref = 0;
  GaugeField gauge;
  ArcCondition arc = ArcCondition::kNatural;
  std::vector<int> dof_to_node;
  std::size_t node_count = 0;

  std::size_t size() const { return dof_to_node.size(); }
  /// Expands a dof vector to a nodal vector (zeros on eliminated nodes).
  CVec expand(const CVec& x) const;
  CVec restrict_to_dofs(const CVec& nodal) const;
};

/// `zero_nodes` (optional, one flag per node) eliminates further nodes, as
/// for a truncation inside an existing mesh.
MagneticSystem assemble(const Mesh& mesh, double b, const GaugeField& gauge,
                        ArcCondition arc = ArcCondition::kNatural,
                        const std::vector<char>& zero_nodes = {});

/// Nodal-field system matrices on all nodes (no elimination).
SpMatR assemble_mass(const Mesh& mesh);
/// Lumped (row-sum) mass.
RVec lumped_mass(const Mesh& mesh);
/// Mass matrix weighted by a scalar potential, integrated with the same rule.
SpMatR assemble_weighted_mass(const Mesh& mesh, const std::function<double(Vec2)>& w);

/// Writes "row col re im" lines.
void write_coo(const SpMatC& A, std::ostream& out);

/// Order parameter plus potential. A box field (coupled mode) contributes
/// its curl energy through `field_energy`.
struct GLState {
  CVec psi;
  GaugeField potential;
  double kappa = 1.0;
  double field_H = 1.0;
  double field_energy = 0.0;  // kappa^2 H^2 int_box |curl A - 1|^2
};

/// E = psi^H K(b) psi - c2 psi^H M psi + (c4 / 2) int |psi|^4.
struct EnergyParams {
  double b = 1.0;
  double c2 = 1.0;
  double c4 = 1.0;
};

/// GL parameters: b = kappa H, c2 = c4 = kappa^2.
EnergyParams gl_params(double kappa, double H);

double gl_energy(const GLState& state, const Mesh& mesh);
/// Wirtinger gradient dE / d conj(psi).
CVec gl_gradient(const GLState& state, const Mesh& mesh);

/// Energy and gradient for a pre-assembled K(b) (nodal, no elimination).
double energy_with(const SpMatC& K, const SpMatR& M, const Mesh& mesh, const CVec& psi,
                   const EnergyParams& p);
CVec gradient_with(const SpMatC& K, const SpMatR& M, const Mesh& mesh, const CVec& psi,
                   const EnergyParams& p);

/// Integral of |psi|^4 (exact for P1 fields) and its fourth root.
double l4_norm4(const CVec& psi, const Mesh& mesh);
double l4_norm(const CVec& psi, const Mesh& mesh);
/// Nodal load N_i = int |psi|^2 psi phi_i.
CVec cubic_load(const CVec& psi, const Mesh& mesh);
/// sqrt(psi^H M psi).
double l2_norm(const CVec& psi, const SpMatR& M);
/// Norm of a residual in the lumped inverse mass metric.
double dual_norm(const CVec& g, const RVec& lumped);

/// Element-wise |(-i grad - b A) psi|^2 integrated over the mesh; used for the
/// gradient-weighted Agmon term.
std::vector<double> element_kinetic_density(const Mesh& mesh, const CVec& psi, double b,
                                            const GaugeField& gauge);

}  // namespace glc
