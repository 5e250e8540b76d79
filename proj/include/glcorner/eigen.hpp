#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "glcorner/assembly.hpp"
#include "glcorner/geometry.hpp"

namespace glc {

struct EigenOptions {
  double tol = 1e-9;
  int max_iter = 400;
  /// Initial shift; NaN picks one automatically (slightly below zero, or
  /// below `hint` when given).
  double shift = std::numeric_limits<double>::quiet_NaN();
  /// Estimate of the smallest eigenvalue (e.g. from a coarser mesh).
  double hint = std::numeric_limits<double>::quiet_NaN();
  /// Moves the shift next to the lowest Ritz value once it is reliable.
  bool adaptive_shift = true;
  int block = 0;   // 0 -> max(k + 3, 2k)
  int blocks = 6;  // Krylov blocks kept before a thick restart
  std::uint64_t seed = 12345;
};

struct SpectralResult {
  std::vector<double> eigenvalues;
  std::vector<CVec> eigenvectors;  // nodal (or dof) vectors, M-orthonormal
  std::vector<double> residuals;   // ||K v - lambda M v||_{M^-1} / max(1, |lambda|)
  double mesh_h = 0.0;
  double truncation_R = 0.0;
  int iterations = 0;
};

/// k smallest eigenpairs of the pencil (K, M), K Hermitian, M SPD. Shift-invert
/// block Krylov iteration with thick restarts and Rayleigh-Ritz.
SpectralResult smallest_eigenpairs(const SpMatC& K, const SpMatR& M, int k,
                                   const EigenOptions& options = {});

/// Same on an assembled system; eigenvectors are expanded to nodal vectors.
SpectralResult smallest_eigenpairs(const MagneticSystem& system, int k, double tol,
                                   EigenOptions options = {});

// ---- half-line fiber oracle ------------------------------------------------------

/// Lowest eigenvalue of -u'' + (t - xi)^2 u on t > 0 with u'(0) = 0.
double de_gennes_eigenvalue(double xi, double tol = 1e-10);

struct FiberResult {
  double theta0 = 0.0;
  double xi0 = 0.0;
  double error = 0.0;
};
/// min over xi of the de Gennes eigenvalue.
FiberResult fiber_theta0(double tol = 1e-9);

// ---- sector constants -----------------------------------------------------------

/// Mesh and solver controls for the sector ground energy at unit field.
struct Mu1Options {
  double accuracy = 1e-3;
  /// Size along the straight edges and in the corner zone of the base mesh.
  double h_layer = 0.4;
  double layer_width = 6.0;
  double grading = 0.25;
  double h_max = 4.0;
  /// Most red refinements used for the h-extrapolation (levels 0..n); at
  /// least two are always used.
  int refinements = 3;
  /// Radius of the mesh used for the h-extrapolation (capped at the largest
  /// truncation radius).
  double R_h = std::numeric_limits<double>::infinity();
  /// Equally spaced truncation radii; empty starts from 24 (48 for
  /// alpha >= pi) and grows the outer radius until the tail estimate meets
  /// the target.
  std::vector<double> radii;
  SectorGauge gauge = SectorGauge::kEdgeBlend;
  /// Angular gauge below 0.35 pi, `gauge` otherwise.
  bool auto_gauge = true;
  ArcCondition arc = ArcCondition::kEssentialZero;
};

struct Mu1Result {
  double alpha = 0.0;
  double value = 0.0;
  double error = 0.0;
  double h_error = 0.0;
  double R_error = 0.0;
  double h = 0.0;
  double R = 0.0;
  std::vector<double> radii;
  std::vector<double> lambda_by_R;  // base mesh, per radius
  std::vector<double> lambda_by_h;  // largest radius, per refinement level
  std::size_t nodes = 0;
};

struct TruncationFit {
  double limit = 0.0;
  double error = 0.0;
};
/// Limit R -> infinity of lambda(R) sampled at equally spaced ascending radii.
/// Exponential model (Aitken) unless `algebraic`, in which case
/// c + d/R^2 + e/R^3 through the last three samples. The error compares the
/// last two fits. A sequence that increases by more than 1e-3 * accuracy
/// throws accuracy-not-met.
TruncationFit extrapolate_truncation(const std::vector<double>& radii,
                                     const std::vector<double>& lambdas, bool algebraic,
                                     double accuracy);

/// Unit-field ground energy of the infinite sector of opening alpha,
/// extrapolated in h and in the truncation radius.
Mu1Result mu1(double alpha, const Mu1Options& options = {});

struct Theta0Result {
  Mu1Result sector;       // alpha = pi
  FiberResult fiber;      // 1D cross-check
  double value = 0.0;
  double error = 0.0;
  bool consistent = false;  // |sector - fiber| within combined error bars
};
Theta0Result theta0(const Mu1Options& options = {});

/// Truncated-sector lambda_1(b)/b under exact mesh rescaling by 1/sqrt(b)
/// (standard gauge). Returns the max relative deviation from the first entry.
struct ScalingResult {
  std::vector<double> b;
  std::vector<double> ratio;
  double deviation = 0.0;
};
ScalingResult scaling_check(double alpha, const std::vector<double>& b_list, double R = 6.0,
                            double h = 0.5);
/// Same, with a mesh generated independently for each b at equal relative
/// quality (h and R scaled by 1/sqrt(b)). `error_estimate` is the largest
/// Richardson correction among the solves.
struct IndependentScalingResult {
  ScalingResult scaling;
  double error_estimate = 0.0;
};
IndependentScalingResult scaling_check_independent(double alpha, const std::vector<double>& b_list,
                                                   double R = 6.0, double h = 0.5);

// ---- polygons -------------------------------------------------------------------

struct CornerSpectrum {
  std::vector<double> lambdas;   // sorted Lambda_n
  std::vector<int> corner_of;    // corner index for each Lambda_n
  std::vector<double> mu_by_corner;
  std::vector<double> err_by_corner;
  int K_omega = 0;
  double theta0 = 0.0;
  double theta0_error = 0.0;
  bool assumption_ok = true;
};

/// Thread-safe cache of mu1 by angle (1e-12 tolerance).
class Mu1Cache {
 public:
  explicit Mu1Cache(Mu1Options options = {}) : options_(std::move(options)) {}
  Mu1Result get(double alpha);
  const Mu1Options& options() const { return options_; }

 private:
  Mu1Options options_;
  std::mutex mutex_;
  std::map<double, Mu1Result> cache_;
};

/// Sorted corner energies of a polygon. Lowers the polygon's assumption flag
/// when some corner energy is not below Theta_0.
CornerSpectrum corner_spectrum(PolygonDomain& poly, Mu1Cache& cache, int jobs = 1);
/// Same from a bare list of corner angles.
CornerSpectrum corner_spectrum(const std::vector<double>& angles, Mu1Cache& cache, int jobs = 1);

/// Mesh controls for lambda_1(B) on a polygon, in units of the magnetic
/// length 1/sqrt(B).
struct PolygonSpectrumOptions {
  double h_layer = 0.4;
  double layer_width = 6.0;
  /// Beyond this distance from every corner the edge layer coarsens.
  double corner_zone = 8.0;
  double grading = 0.25;
  double growth = 0.3;
  int refinements = 1;  // Richardson levels
  double tol = 1e-10;
  bool patched_gauge = true;
};

struct Lambda1Result {
  double B = 0.0;
  double value = 0.0;  // extrapolated
  double error = 0.0;
  std::vector<double> by_level;
  std::size_t nodes = 0;
};

Lambda1Result lambda1_polygon(const PolygonDomain& poly, double B,
                              const PolygonSpectrumOptions& options = {});
/// Same on a given base mesh (e.g. one graded for a nearby field strength).
Lambda1Result lambda1_polygon(const PolygonDomain& poly, const Mesh& base, double B,
                              const PolygonSpectrumOptions& options = {});

/// Mesh graded for field strength B (used by eigen, critfield and glmin).
Mesh make_field_mesh(const PolygonDomain& poly, double B, const PolygonSpectrumOptions& options);
SizingFunction field_sizing(const PolygonDomain& poly, double B,
                            const PolygonSpectrumOptions& options);

struct SpectralCurve {
  struct Sample {
    double B;
    double lambda1;
    double error;
  };
  std::vector<Sample> samples;
  std::vector<double> slopes;  // centred differences (one-sided at the ends)
};

SpectralCurve lambda1_curve(const PolygonDomain& poly, const std::vector<double>& B_list,
                            const PolygonSpectrumOptions& options = {}, int jobs = 1);

/// Smallest eigenvalue of K(B) - U_B M on the polygon, with the three-zone
/// corner potential: U_B = B (Lambda_1 - delta) within M0/sqrt(B) of a corner,
/// B (Theta_0 - delta) within M0/sqrt(B) of the boundary, B (1 - delta)
/// elsewhere.
struct UbGapResult {
  double value = 0.0;
  double lambda1 = 0.0;
  std::size_t nodes = 0;
};
UbGapResult ub_gap(const PolygonDomain& poly, double B, double delta, double M0,
                   double Lambda1, double Theta0, bool zero_potential = false,
                   const PolygonSpectrumOptions& options = {});

}  // namespace glc
