#include "state_transport/errors.hpp"

namespace state_transport {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidMatrix: return "invalid-matrix";
    case ErrorKind::kSymmetryViolation: return "symmetry-violation";
    case ErrorKind::kNotUnitary: return "not-unitary";
    case ErrorKind::kNotUnitVector: return "not-unit-vector";
    case ErrorKind::kNotPsd: return "not-psd";
    case ErrorKind::kRankDeficient: return "rank-deficiency";
    case ErrorKind::kBranchCut: return "branch-cut";
    case ErrorKind::kInsufficientDimension: return "insufficient-dimension";
    case ErrorKind::kInvalidTarget: return "invalid-target";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kDisjointness: return "disjointness";
    case ErrorKind::kInfeasiblePartition: return "infeasible-partition";
    case ErrorKind::kDegenerateWindow: return "degenerate-window";
    case ErrorKind::kUnsupportedGroup: return "unsupported-group";
    case ErrorKind::kFlipInconsistency: return "flip-inconsistency";
    case ErrorKind::kDetourFailure: return "detour-failure";
    case ErrorKind::kTowerSpec: return "tower-spec";
    case ErrorKind::kRoundFailure: return "round-failure";
    case ErrorKind::kAssembly: return "assembly";
    case ErrorKind::kCertification: return "certification";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message, double measured)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      measured_(measured) {}

}  // namespace state_transport
