#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace glc {

enum class ErrorKind {
  kInvalidParameter,
  kInvalidGeometry,
  kMeshingFailure,
  kConvergenceFailure,
  kAccuracyNotMet,
  kNoRoot,
  kConditioningError,
  kSolverError,
  kNumericalInstability,
  kUndefinedRatio,
};

const char* to_string(ErrorKind kind);

/// Library-wide exception. `best_residual` is set for convergence failures.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        double best_residual = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        best_residual_(best_residual) {}

  ErrorKind kind() const noexcept { return kind_; }
  double best_residual() const noexcept { return best_residual_; }

 private:
  ErrorKind kind_;
  double best_residual_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace glc
