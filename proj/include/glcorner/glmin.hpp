#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "glcorner/assembly.hpp"
#include "glcorner/eigen.hpp"
#include "glcorner/error.hpp"

namespace glc {

enum class InitKind { kZero, kLinearMode, kRandom, kExplicit };
const char* to_string(InitKind kind);
InitKind init_from_string(const std::string& s);

struct DescentOptions {
  /// Stop when the lumped-dual gradient norm is below tol * c2 * ||psi||_2.
  /// Relative, so that a slowly decaying state near zero is not mistaken
  /// for a critical point.
  double tol = 1e-7;
  int max_iter = 4000;
  InitKind init = InitKind::kLinearMode;
  CVec explicit_psi;  // for kExplicit
  std::uint64_t seed = 2024;
  /// ||psi||_2 <= trivial_threshold * sqrt(area) declares the normal state.
  double trivial_threshold = 1e-6;
  double maxp_tol = 1e-3;
};

struct MinimizationOutcome {
  GLState state;
  double energy = 0.0;
  double grad_norm = 0.0;  // lumped-dual norm of the Wirtinger gradient
  int iterations = 0;
  bool trivial_flag = false;
  double max_abs = 0.0;   // max nodal |psi|
  double l2 = 0.0;
  /// Smallest eigenvalue used by the linear-mode start (NaN otherwise), and
  /// the trial energy of that start.
  double lambda1 = std::numeric_limits<double>::quiet_NaN();
  double trial_energy = 0.0;
  std::vector<double> energy_history;  // after every accepted step
  /// Coupled mode: sweeps, and the penalized objective after each sweep.
  int sweeps = 0;
  std::vector<double> sweep_objective;
  std::vector<Vec2> box_field;  // a = A - F on the box nodes
  double curl_l2 = 0.0;         // ||curl A - 1||_2 over the box
  double div_l2 = 0.0;          // ||div a||_2 over the box
  double grad_a_l2 = 0.0;       // ||grad a||_2 over the box
};

/// Thrown when the iteration budget runs out; carries the best state.
class MinimizationFailure : public Error {
 public:
  MinimizationFailure(const std::string& what, MinimizationOutcome best)
      : Error(ErrorKind::kConvergenceFailure, what, best.grad_norm), best_(std::move(best)) {}
  const MinimizationOutcome& best() const { return best_; }

 private:
  MinimizationOutcome best_;
};

/// Descent on E(psi) = psi^H K psi - c2 psi^H M psi + (c4/2) int |psi|^4 with
/// nodes flagged in `fixed_zero` held at 0. Preconditioned nonlinear conjugate
/// gradients; the energy along a search line is a quartic polynomial, which is
/// minimized exactly and accepted only if it decreases the energy (halving
/// otherwise). `K` and `M` are nodal (no elimination).
MinimizationOutcome minimize_energy(const Mesh& mesh, const SpMatC& K, const SpMatR& M,
                                    const EnergyParams& p, const DescentOptions& options,
                                    const std::vector<char>& fixed_zero = {});

/// GL energy with A frozen to `gauge` (curl 1).
MinimizationOutcome minimize_frozen(const Mesh& mesh, double kappa, double H,
                                    const GaugeField& gauge, const DescentOptions& options = {});
inline MinimizationOutcome minimize_frozen(const Mesh& mesh, double kappa, double H,
                                           const DescentOptions& options = {}) {
  return minimize_frozen(mesh, kappa, H, GaugeField::standard(), options);
}

/// Lower-energy result of the linear-mode and the random start. For large
/// kappa the first eigenvector may sit in a single corner (tunneling below the
/// mesh asymmetry) and descent then stops with the other corners empty.
MinimizationOutcome minimize_frozen_multistart(const Mesh& mesh, double kappa, double H,
                                               const GaugeField& gauge,
                                               const DescentOptions& options = {});

/// Frozen-field minimum on a polygon at refinement levels 0..levels of the
/// mesh graded for kappa H (polygon gauge, two starts per level), with a
/// second-order Richardson step over the last two levels.
struct LeveledEnergy {
  double energy = 0.0;  // extrapolated (the finest level when levels = 0)
  double error = 0.0;   // |extrapolated - finest|
  std::vector<double> by_level;
  std::vector<std::size_t> nodes;
  Mesh mesh;                    // finest
  MinimizationOutcome outcome;  // finest
};
LeveledEnergy frozen_energy_levels(const PolygonDomain& poly, double kappa, double H, int levels,
                                   const DescentOptions& options = {});

struct CoupledOptions {
  DescentOptions psi;
  /// Stop when the penalized objective drops by less than this in a sweep.
  double tol = 1e-9;
  int max_sweeps = 60;
  /// Closed-form part of A on the domain. Any unit-curl field works; the
  /// corner-patched gauge keeps the phase of psi resolvable on coarse meshes.
  GaugeField base = GaugeField::standard();
};

/// Alternating minimization over psi (on box.domain) and A = F + a, with a
/// a nodal vector field on the box vanishing on its boundary. The A-step
/// minimizes the energy plus (kappa H)^2 int_box |div a|^2, which for a = 0
/// on the boundary turns the field term into a vector Dirichlet form.
MinimizationOutcome minimize_coupled(const BoxMesh& box, double kappa, double H,
                                     const CoupledOptions& options = {});

// ---- sector model -------------------------------------------------------------

struct SectorModelOptions {
  /// Truncation radii as fractions of R; nested in one mesh.
  std::vector<double> radius_fractions = {0.55, 0.7, 0.85, 1.0};
  double h_layer = 0.25;
  double layer_width = 6.0;
  double grading = 0.25;
  double h_max = 2.0;
  /// Richardson levels in h (0 uses the base mesh only).
  int refinements = 1;
  SectorGauge gauge = SectorGauge::kEdgeBlend;
  /// Fraction of ||psi||^2 allowed beyond 0.85 R.
  double boundary_mass = 1e-4;
  /// Lambda of the scaled functional (1 = the functional itself).
  double scale = 1.0;
  DescentOptions descent;
};

struct SectorModelResult {
  double alpha = 0.0;
  double mu1_param = 0.0;
  double mu2_param = 0.0;
  double energy = 0.0;  // extrapolated in R (and h)
  double error = 0.0;
  double raw_energy = 0.0;  // finest mesh, largest radius
  std::vector<double> radii;
  std::vector<double> energy_by_R;
  std::vector<double> energy_by_h;
  CVec psi0;
  Mesh mesh;
  double max_abs = 0.0;
  double decay_rate = 0.0;
  double outer_mass = 0.0;
  bool trivial = false;
};

/// Minimizer of J = int |(-i grad - F) psi|^2 - mu1 |psi|^2 + (mu2/2) |psi|^4 on
/// the sector, truncated at radius R with psi = 0 on the arc.
SectorModelResult sector_model(double alpha, double mu1_param, double mu2_param, double R,
                               double tol, const SectorModelOptions& options = {});

// ---- onset ----------------------------------------------------------------------

struct OnsetOptions {
  PolygonSpectrumOptions spectrum;
  /// Red refinements of the field mesh used for all probes.
  int refinements = 1;
  DescentOptions descent;
  int scan_points = 7;
  double Lambda1 = 0.0;  // place the initial grid; required
  double Theta0 = 0.0;
  int jobs = 1;
  int max_restarts = 2;
};

struct OnsetResult {
  double H_star = 0.0;
  double bracket[2] = {0.0, 0.0};
  int probes = 0;
  bool monotone = true;
  std::vector<std::string> warnings;
  std::vector<double> probe_H;
  std::vector<char> probe_trivial;
};

/// One probe of the onset predicate on a fixed mesh.
struct OnsetProbe {
  double H = 0.0;
  bool trivial_linear = false;
  bool trivial_random = false;
  bool budget_exhausted = false;
  bool trivial() const { return trivial_linear && trivial_random; }
};
OnsetProbe probe_onset(const PolygonDomain& poly, const Mesh& mesh, double kappa, double H,
                       const OnsetOptions& options);
/// Mesh used for all probes at this kappa.
Mesh onset_mesh(const PolygonDomain& poly, double kappa, const OnsetOptions& options);

/// Smallest field above which both the linear-mode and the random start
/// descend to the normal state, bracketed to width tol_H.
OnsetResult detect_onset(const PolygonDomain& poly, double kappa, double tol_H,
                         const OnsetOptions& options);

// ---- serialization --------------------------------------------------------------

/// Versioned JSON document: mesh fingerprint, parameters, nodal psi and the
/// nodal gauge correction. Closed-form base fields are not stored; the file
/// records their kind and the caller supplies the field on loading.
void save_state(std::ostream& out, const GLState& state, const Mesh& mesh);
GLState load_state(std::istream& in, const Mesh& mesh,
                   const GaugeField& base = GaugeField::standard());

}  // namespace glc
