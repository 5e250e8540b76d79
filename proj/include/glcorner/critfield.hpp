#pragma once

#include <string>
#include <vector>

#include "glcorner/eigen.hpp"

namespace glc {

struct CritFieldOptions {
  /// Two refinement levels by default: one is too coarse for tolerances
  /// near 1e-3.
  PolygonSpectrumOptions spectrum = [] {
    PolygonSpectrumOptions s;
    s.refinements = 2;
    return s;
  }();
  /// Smallest kappa accepted by the root solver.
  double kappa0 = 3.0;
  /// Points of the sign scan across the search interval.
  int scan_points = 7;
  int max_evaluations = 40;
  /// A base mesh graded for B is reused for fields within this relative
  /// distance.
  double mesh_reuse = 0.01;
};

struct CriticalFieldResult {
  double kappa = 0.0;
  double H_lin = 0.0;
  double residual = 0.0;  // lambda1(kappa H_lin) - kappa^2
  double bracket[2] = {0.0, 0.0};
  double lambda1_at_root = 0.0;
  double lambda1_error = 0.0;
  int evaluations = 0;
  /// False when the scan found more than one sign change or a decreasing step.
  bool monotone = true;
  std::vector<std::string> warnings;
};

/// Root of lambda1(kappa H) = kappa^2 in [0.5 kappa / Theta0, 2 kappa / Lambda1]:
/// sign scan, bisection on the first bracket, secant polishing. `Lambda1`
/// and `Theta0` only place the search interval.
CriticalFieldResult solve_hc3_linear(const PolygonDomain& poly, double kappa, double tol,
                                     double Lambda1, double Theta0,
                                     const CritFieldOptions& options = {});

/// Independent kappa values run on up to `jobs` threads.
std::vector<CriticalFieldResult> solve_hc3_sweep(const PolygonDomain& poly,
                                                 const std::vector<double>& kappas, double tol,
                                                 double Lambda1, double Theta0,
                                                 const CritFieldOptions& options = {},
                                                 int jobs = 1);

struct ExpansionFit {
  double lambda1 = 0.0;
  std::vector<double> etas;  // eta_1 .. eta_J
  /// max_i |H_fit(kappa_i) - H_i| / H_i
  double fit_residual = 0.0;
  double condition = 1.0;
};

/// Least squares of H Lambda1 / kappa - 1 on kappa^-1 .. kappa^-J; the
/// leading term kappa / Lambda1 is fixed.
ExpansionFit fit_expansion(const std::vector<CriticalFieldResult>& results, int J,
                           double Lambda1);

}  // namespace glc
