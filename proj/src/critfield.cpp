#include "glcorner/critfield.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "glcorner/error.hpp"
#include "glcorner/parallel.hpp"

namespace glc {

namespace {

// lambda1(kappa H) - kappa^2 with base meshes reused across nearby fields.
class RootFunction {
 public:
  RootFunction(const PolygonDomain& poly, double kappa, const CritFieldOptions& o)
      : poly_(poly), kappa_(kappa), o_(o) {}

  double operator()(double H) {
    const double B = kappa_ * H;
    require(++evaluations_ <= o_.max_evaluations, ErrorKind::kConvergenceFailure,
            "critical-field root: evaluation budget exhausted");
    const Mesh* mesh = nullptr;
    for (const auto& [b, m] : meshes_)
      if (std::abs(b - B) <= o_.mesh_reuse * B) mesh = &m;
    if (!mesh) mesh = &meshes_.emplace(B, make_field_mesh(poly_, B, o_.spectrum)).first->second;
    const Lambda1Result r = lambda1_polygon(poly_, *mesh, B, o_.spectrum);
    results_[H] = r;
    return r.value - kappa_ * kappa_;
  }

  const Lambda1Result& at(double H) const { return results_.at(H); }
  int evaluations() const { return evaluations_; }

 private:
  const PolygonDomain& poly_;
  double kappa_;
  const CritFieldOptions& o_;
  std::map<double, Mesh> meshes_;
  std::map<double, Lambda1Result> results_;
  int evaluations_ = 0;
};

}  // namespace

CriticalFieldResult solve_hc3_linear(const PolygonDomain& poly, double kappa, double tol,
                                     double Lambda1, double Theta0, const CritFieldOptions& o) {
  require(tol > 0 && std::isfinite(tol), ErrorKind::kInvalidParameter, "tolerance must be positive");
  require(kappa >= o.kappa0, ErrorKind::kInvalidParameter, "kappa below the validity threshold");
  require(Lambda1 > 0 && Theta0 > 0, ErrorKind::kInvalidParameter, "spectral constants must be positive");
  require(o.scan_points >= 2, ErrorKind::kInvalidParameter, "need at least two scan points");

  CriticalFieldResult r;
  r.kappa = kappa;
  RootFunction f(poly, kappa, o);
  const double k2 = kappa * kappa;
  const double lo = 0.5 * kappa / Theta0, hi = 2.0 * kappa / Lambda1;

  // Sign scan; the map is increasing for large B, so one change is expected.
  std::vector<double> Hs, fs;
  for (int i = 0; i < o.scan_points; ++i) {
    Hs.push_back(lo + (hi - lo) * i / (o.scan_points - 1));
    fs.push_back(f(Hs.back()));
  }
  int changes = 0, first = -1;
  for (int i = 0; i + 1 < o.scan_points; ++i) {
    if ((fs[i] < 0) != (fs[i + 1] < 0)) {
      ++changes;
      if (first < 0) first = i;
    }
    if (fs[i + 1] <= fs[i]) {
      r.monotone = false;
      r.warnings.push_back("lambda1(kappa H) - kappa^2 decreases between H = " +
                           std::to_string(Hs[i]) + " and " + std::to_string(Hs[i + 1]));
    }
  }
  if (first < 0) throw Error(ErrorKind::kNoRoot, "no sign change of lambda1(kappa H) - kappa^2");
  if (changes > 1) {
    r.monotone = false;
    r.warnings.push_back("more than one sign change in the search interval");
  }

  double a = Hs[first], b = Hs[first + 1], fa = fs[first], fb = fs[first + 1];
  // Bisection until the bracket is narrow, then secant steps kept inside it.
  while (b - a > 0.02 * a) {
    const double m = 0.5 * (a + b), fm = f(m);
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  double H = a, fH = fa;
  if (std::abs(fb) < std::abs(fa)) {
    H = b;
    fH = fb;
  }
  int side = 0;
  while (std::abs(fH) > tol * k2 && b - a > 1e-13 * b) {
    // Illinois variant of regula falsi: halve the retained end's value when it
    // is kept twice in a row.
    double m = (a * fb - b * fa) / (fb - fa);
    if (!(m > a && m < b)) m = 0.5 * (a + b);
    const double fm = f(m);
    H = m;
    fH = fm;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = m;
      fb = fm;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
  }
  r.H_lin = H;
  r.residual = fH;
  r.bracket[0] = a;
  r.bracket[1] = b;
  r.lambda1_at_root = f.at(H).value;
  r.lambda1_error = f.at(H).error;
  r.evaluations = f.evaluations();
  if (std::abs(r.residual) > tol * k2)
    throw Error(ErrorKind::kConvergenceFailure, "critical-field root did not reach the tolerance");
  if (r.lambda1_error > tol * k2)
    throw Error(ErrorKind::kAccuracyNotMet, "eigenvalue accuracy is insufficient for the tolerance");
  return r;
}

std::vector<CriticalFieldResult> solve_hc3_sweep(const PolygonDomain& poly,
                                                 const std::vector<double>& kappas, double tol,
                                                 double Lambda1, double Theta0,
                                                 const CritFieldOptions& o, int jobs) {
  require(!kappas.empty(), ErrorKind::kInvalidParameter, "kappa list is empty");
  std::vector<CriticalFieldResult> out(kappas.size());
  parallel_for(kappas.size(), jobs, [&](std::size_t i) {
    out[i] = solve_hc3_linear(poly, kappas[i], tol, Lambda1, Theta0, o);
  });
  return out;
}

ExpansionFit fit_expansion(const std::vector<CriticalFieldResult>& results, int J, double Lambda1) {
  require(J >= 0, ErrorKind::kInvalidParameter, "fit order must be nonnegative");
  require(Lambda1 > 0, ErrorKind::kInvalidParameter, "Lambda1 must be positive");
  std::vector<double> distinct;
  for (const auto& r : results) {
    require(r.kappa > 0 && r.H_lin > 0, ErrorKind::kInvalidParameter, "invalid critical-field sample");
    if (std::none_of(distinct.begin(), distinct.end(),
                     [&](double k) { return std::abs(k - r.kappa) <= 1e-12 * k; }))
      distinct.push_back(r.kappa);
  }
  require(distinct.size() >= static_cast<std::size_t>(J + 2), ErrorKind::kInvalidParameter,
          "need at least J + 2 distinct kappa values");

  ExpansionFit fit;
  fit.lambda1 = Lambda1;
  const auto n = static_cast<Eigen::Index>(results.size());
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i)
    y[i] = results[i].H_lin * Lambda1 / results[i].kappa - 1.0;
  if (J > 0) {
    const auto [kmin, kmax] = std::minmax_element(distinct.begin(), distinct.end());
    if (*kmax < 4.0 * *kmin)
      throw Error(ErrorKind::kConditioningError, "kappa range spans less than a factor 4");
    Eigen::MatrixXd A(n, J);
    for (Eigen::Index i = 0; i < n; ++i)
      for (int j = 0; j < J; ++j) A(i, j) = std::pow(results[i].kappa, -(j + 1));
    // Column scaling so that the condition number reflects the data spread.
    const Eigen::VectorXd s = A.colwise().norm().transpose();
    const Eigen::MatrixXd As = A * s.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(As);
    const auto& sv = svd.singularValues();
    fit.condition = sv[0] / sv[sv.size() - 1];
    if (!(fit.condition < 1e8))
      throw Error(ErrorKind::kConditioningError, "expansion design matrix is ill-conditioned");
    const Eigen::VectorXd c = As.colPivHouseholderQr().solve(y).cwiseQuotient(s);
    fit.etas.assign(c.data(), c.data() + c.size());
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double series = 1.0;
    for (int j = 0; j < J; ++j) series += fit.etas[j] * std::pow(results[i].kappa, -(j + 1));
    const double Hfit = results[i].kappa / Lambda1 * series;
    fit.fit_residual = std::max(fit.fit_residual, std::abs(Hfit - results[i].H_lin) / results[i].H_lin);
  }
  return fit;
}

}  // namespace glc
