#pragma once

#include <stdexcept>
#include <string>

namespace state_transport {

enum class ErrorKind {
  kInvalidMatrix,
  kSymmetryViolation,
  kNotUnitary,
  kNotUnitVector,
  kNotPsd,
  kRankDeficient,
  kBranchCut,
  kInsufficientDimension,
  kInvalidTarget,
  kPrecondition,
  kDisjointness,
  kInfeasiblePartition,
  kDegenerateWindow,
  kUnsupportedGroup,
  kFlipInconsistency,
  kDetourFailure,
  kTowerSpec,
  kRoundFailure,
  kAssembly,
  kCertification,
};

const char* to_string(ErrorKind kind) noexcept;

// Every library failure is reported through this type. `measured()` carries
// the offending quantity (a statistics gap, an eigenvalue, ...) when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, double measured = 0.0);

  ErrorKind kind() const noexcept { return kind_; }
  double measured() const noexcept { return measured_; }

 private:
  ErrorKind kind_;
  double measured_;
};

}  // namespace state_transport
