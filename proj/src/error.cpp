#include "glcorner/error.hpp"

namespace glc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidParameter: return "invalid-parameter";
    case ErrorKind::kInvalidGeometry: return "invalid-geometry";
    case ErrorKind::kMeshingFailure: return "meshing-failure";
    case ErrorKind::kConvergenceFailure: return "convergence-failure";
    case ErrorKind::kAccuracyNotMet: return "accuracy-not-met";
    case ErrorKind::kNoRoot: return "no-root";
    case ErrorKind::kConditioningError: return "conditioning-error";
    case ErrorKind::kSolverError: return "solver-error";
    case ErrorKind::kNumericalInstability: return "numerical-instability";
    case ErrorKind::kUndefinedRatio: return "undefined-ratio";
  }
  return "unknown";
}

}  // namespace glc
