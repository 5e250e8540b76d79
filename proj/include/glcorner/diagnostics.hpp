#pragma once

#include <string>
#include <vector>

#include "glcorner/glmin.hpp"

namespace glc {

struct AgmonReport {
  double epsilon = 0.0;
  double M = 0.0;
  /// int e^{w} (|psi|^2 + (kappa H)^-1 |p psi|^2), w the weight exponent.
  double weighted_mass = 0.0;
  /// int |psi|^2 over the near zone.
  double near_mass = 0.0;
  double ratio = 0.0;
  double total_mass = 0.0;
  /// Decay rate of |psi| in the scaled distance sqrt(kappa H) d, fitted to
  /// the largest |psi| per distance bin (positive means decay).
  double fitted_rate = 0.0;
  std::size_t fit_bins = 0;
};

/// Weight e^{eps sqrt(kappa H) d(x, corners)}, near zone sqrt(kappa H) d <= M.
/// `sigma_prime` lists polygon corner ids present in the mesh.
AgmonReport agmon_corner(const Mesh& mesh, const MinimizationOutcome& outcome,
                         const std::vector<int>& sigma_prime, double epsilon, double M);

/// Weight e^{2 eps sqrt(kappa H) t(x)}, t the distance to the boundary; near
/// zone t <= M / sqrt(kappa H). Requires H > kappa.
AgmonReport agmon_boundary(const Mesh& mesh, const MinimizationOutcome& outcome, double epsilon,
                           double M);

/// Reports on an (epsilon, M) grid, epsilon-major.
std::vector<AgmonReport> agmon_grid(const Mesh& mesh, const MinimizationOutcome& outcome,
                                    const std::vector<int>& sigma_prime,
                                    const std::vector<double>& epsilons,
                                    const std::vector<double>& Ms);

/// ||psi||^2 against the mass in the layer sqrt(kappa (H - kappa)) t <= 1.
struct WeakDecayReport {
  double total_mass = 0.0;
  double layer_mass = 0.0;
  double ratio = 0.0;           // total / layer
  double scaled_total = 0.0;    // total * sqrt(kappa (H - kappa))
};
WeakDecayReport weak_decay(const Mesh& mesh, const MinimizationOutcome& outcome);

/// Corners s with mu1(alpha_s) <= mu.
std::vector<int> select_corners(const CornerSpectrum& spectrum, double mu);

struct CornerMassProfile {
  /// Fraction of ||psi||^2 within M / kappa of each corner, by corner id; a
  /// point in two zones counts for the nearer corner.
  std::vector<double> fraction;
  double off_corner = 0.0;
  std::vector<int> sigma_prime;
  double sigma_prime_fraction = 0.0;
  double M = 0.0;
  bool trivial = false;
};
CornerMassProfile corner_mass_profile(const Mesh& mesh, const MinimizationOutcome& outcome,
                                      const CornerSpectrum& spectrum, double mu, double M = 2.0);

struct EnergyReport {
  double gl_energy = 0.0;
  double corner_sum = 0.0;
  double corner_sum_error = 0.0;
  double mu = 0.0;
  /// |gl - sum| / |sum|; the absolute gap when the sum vanishes.
  double rel_gap = 0.0;
  /// No corner is spectrally active (sum = 0).
  bool degenerate = false;
};
/// `sectors` must contain a result at (mu, mu) for every corner angle.
EnergyReport energy_vs_corner_sum(double gl_energy, const PolygonDomain& poly,
                                  const std::vector<SectorModelResult>& sectors, double mu);

struct SanityItem {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};
struct SanityReport {
  std::vector<SanityItem> items;
  bool all_hold = true;
  /// ||grad (A - F)|| / ||curl A - 1|| on the box (coupled states; NaN
  /// otherwise).
  double field_constant = 0.0;
};
/// The a-priori bounds for minimizers: max |psi| <= 1, ||psi||_4^2 <= ||psi||_2,
/// ||p psi|| <= kappa ||psi||, H ||curl A - 1|| <= ||psi||, and E <= 0.
SanityReport minimizer_sanity(const Mesh& mesh, const MinimizationOutcome& outcome,
                              double tol = 1e-8, double maxp_tol = 1e-3);

/// Least-squares slope with its standard error; `positive` when the slope
/// exceeds twice its standard error.
struct Trend {
  double slope = 0.0;
  double stderr_slope = 0.0;
  bool positive = false;
};
Trend linear_trend(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace glc
