#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "glcorner/eigen.hpp"
#include "glcorner/error.hpp"

namespace glc {

namespace {

using CMat = Eigen::MatrixXcd;
using Index = Eigen::Index;

class ShiftInvert {
 public:
  ShiftInvert(const SpMatC& K, const SpMatR& M) : K_(K), Mc_(M.cast<cplx>()) {
    SpMatC A = K_ - 0.0 * Mc_;
    llt_.analyzePattern(A);
  }

  // Factors K - sigma M; fails unless the matrix is positive definite.
  bool factor(double sigma) {
    SpMatC A = K_ - sigma * Mc_;
    llt_.factorize(A);
    if (llt_.info() != Eigen::Success) return false;
    sigma_ = sigma;
    return true;
  }
  double sigma() const { return sigma_; }
  CMat solve(const CMat& B) const { return llt_.solve(B); }

 private:
  const SpMatC& K_;
  SpMatC Mc_;
  double sigma_ = 0.0;
  Eigen::SimplicialLLT<SpMatC, Eigen::Lower, Eigen::AMDOrdering<int>> llt_;
};

// ||r||_{M^-1} for complex r with a real factorization of M.
class InverseMassNorm {
 public:
  explicit InverseMassNorm(const SpMatR& M) : llt_(M) {
    require(llt_.info() == Eigen::Success, ErrorKind::kSolverError, "mass matrix is not SPD");
  }
  double operator()(const CVec& r) const {
    const RVec re = r.real(), im = r.imag();
    const RVec zr = llt_.solve(re), zi = llt_.solve(im);
    return std::sqrt(std::max(0.0, re.dot(zr) + im.dot(zi)));
  }

 private:
  Eigen::SimplicialLLT<SpMatR> llt_;
};

}  // namespace

SpectralResult smallest_eigenpairs(const SpMatC& K, const SpMatR& M, int k,
                                   const EigenOptions& opt) {
  const Index n = K.rows();
  require(K.cols() == n && M.rows() == n && M.cols() == n, ErrorKind::kInvalidParameter,
          "K and M must be square and of equal size");
  require(k >= 1, ErrorKind::kInvalidParameter, "k must be positive");
  require(k <= n, ErrorKind::kInvalidParameter, "k exceeds the problem dimension");
  require(opt.tol > 0 && std::isfinite(opt.tol), ErrorKind::kInvalidParameter,
          "tolerance must be positive");
  require(opt.max_iter > 0, ErrorKind::kInvalidParameter, "max_iter must be positive");

  const Index p = std::min<Index>(n, opt.block > 0 ? std::max(opt.block, k) : std::max(k + 3, 2 * k));
  const Index cap = std::min<Index>(n, p * std::max(2, opt.blocks));

  ShiftInvert op(K, M);
  InverseMassNorm mnorm(M);

  double sigma;
  if (std::isfinite(opt.shift)) {
    sigma = opt.shift;
  } else if (std::isfinite(opt.hint)) {
    sigma = opt.hint - 0.03 * std::max(std::abs(opt.hint), 1e-2);
  } else {
    sigma = -1e-2;
  }
  {
    bool ok = op.factor(sigma);
    for (int t = 0; !ok && t < 40; ++t) {
      sigma -= 2.0 * std::max(std::abs(sigma), 1e-2);
      ok = op.factor(sigma);
    }
    require(ok, ErrorKind::kSolverError, "could not factor the shifted operator");
  }

  CMat V(n, cap), KV(n, cap), MV(n, cap);
  Index m = 0;

  // Appends the M-orthonormalized columns of W to the basis.
  auto append = [&](CMat W) {
    for (Index c = 0; c < W.cols() && m < cap; ++c) {
      CVec w = W.col(c);
      const double n0 = std::sqrt(std::max(0.0, w.dot(M * w).real()));
      if (!(n0 > 0)) continue;
      for (int pass = 0; pass < 2; ++pass) {
        if (m == 0) break;
        const CVec coef = MV.leftCols(m).adjoint() * w;
        w -= V.leftCols(m) * coef;
      }
      const CVec mw = M * w;
      const double nw = std::sqrt(std::max(0.0, w.dot(mw).real()));
      if (nw < 1e-14 * n0) continue;
      V.col(m) = w / nw;
      MV.col(m) = mw / nw;
      KV.col(m) = K * V.col(m);
      ++m;
    }
  };

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  CMat X(n, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) X(i, j) = cplx(normal(rng), normal(rng));
  append(X);

  SpectralResult out;
  Eigen::VectorXd theta;
  CMat KX, MX;
  std::vector<double> res(static_cast<std::size_t>(p), 0.0);
  double best = std::numeric_limits<double>::infinity();
  int refactors = opt.adaptive_shift ? 0 : 6;

  for (int it = 1; it <= opt.max_iter; ++it) {
    CMat H = V.leftCols(m).adjoint() * KV.leftCols(m);
    CMat G = V.leftCols(m).adjoint() * MV.leftCols(m);
    H = 0.5 * (H + H.adjoint().eval());
    G = 0.5 * (G + G.adjoint().eval());
    Eigen::GeneralizedSelfAdjointEigenSolver<CMat> ges(H, G);
    require(ges.info() == Eigen::Success, ErrorKind::kSolverError, "Rayleigh-Ritz step failed");
    const Index q = std::min<Index>(p, m);
    const CMat Y = ges.eigenvectors().leftCols(q);
    theta = ges.eigenvalues().head(q);
    X = V.leftCols(m) * Y;
    KX = KV.leftCols(m) * Y;
    MX = MV.leftCols(m) * Y;

    double worst = 0.0;
    for (Index j = 0; j < q; ++j) {
      const CVec r = KX.col(j) - theta[j] * MX.col(j);
      const double ra = mnorm(r);
      res[static_cast<std::size_t>(j)] = ra / std::max(1.0, std::abs(theta[j]));
      if (j < k) worst = std::max(worst, res[static_cast<std::size_t>(j)]);
    }
    best = std::min(best, worst);
    out.iterations = it;
    if (q >= k && worst <= opt.tol) break;
    if (it == opt.max_iter) {
      throw Error(ErrorKind::kConvergenceFailure,
                  "eigensolver did not reach the requested residual", best);
    }
    if (m == n) {
      // Exact subspace; remaining residual is rounding.
      if (worst <= 1e3 * opt.tol || worst < 1e-12) break;
      throw Error(ErrorKind::kConvergenceFailure, "eigensolver stagnated on the full space", best);
    }

    // Move the shift toward the lowest Ritz value. A shift above the true
    // eigenvalue makes the factorization fail, in which case it backs off.
    const double ra0 = res[0] * std::max(1.0, std::abs(theta[0]));
    if (refactors < 6 && q > 1 && it > 1) {
      const double old = op.sigma();
      double s = theta[0] - std::max(2.0 * ra0, 1e-2 * (theta[q - 1] - theta[0]));
      if (s > old + 0.5 * (theta[0] - old)) {
        ++refactors;
        bool ok = false;
        for (int t = 0; t < 6 && s > old; ++t) {
          if ((ok = op.factor(s))) break;
          s -= 4.0 * (theta[0] - s);
        }
        if (!ok) require(op.factor(old), ErrorKind::kSolverError, "refactorization failed");
      }
    }

    CMat W = op.solve(M * X);
    if (m + W.cols() > cap) {
      // Thick restart; products are recomputed so rounding does not build up.
      V.leftCols(q) = X;
      KV.leftCols(q) = K * X;
      MV.leftCols(q) = M * X;
      m = q;
    }
    append(W);
  }

  const Index q = std::min<Index>(p, m);
  for (Index j = 0; j < k && j < q; ++j) {
    out.eigenvalues.push_back(theta[j]);
    CVec v = X.col(j);
    Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const cplx ph = std::abs(v[imax]) > 0 ? std::conj(v[imax]) / std::abs(v[imax]) : cplx(1.0);
    out.eigenvectors.push_back(v * ph);
    out.residuals.push_back(res[static_cast<std::size_t>(j)]);
  }
  return out;
}

SpectralResult smallest_eigenpairs(const MagneticSystem& system, int k, double tol,
                                   EigenOptions options) {
  options.tol = tol;
  if (!std::isfinite(options.shift) && !std::isfinite(options.hint))
    options.shift = -1e-2 * std::max(1.0, system.b);
  SpectralResult r = smallest_eigenpairs(system.K, system.M, k, options);
  for (auto& v : r.eigenvectors) v = system.expand(v);
  return r;
}

}  // namespace glc
