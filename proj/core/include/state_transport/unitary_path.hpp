#pragma once

// Piecewise one-parameter paths in the unitary group with length bookkeeping.

#include <memory>
#include <vector>

#include "state_transport/linalg.hpp"

namespace state_transport {

/// Nonzero part of a Hermitian spectrum: h = V diag(values) V^* with V an
/// isometry; the orthogonal complement of range(V) is the kernel of h.
struct LowRankSpectrum {
  RealVector values;
  Matrix vectors;

  /// Drops eigenvalues with |lambda| <= 1e-14 max(1, ||h||).
  static LowRankSpectrum of(const HermitianMatrix& h);
  /// exp(i t h) = I + V (diag(e^{i t lambda}) - 1) V^*.
  Matrix exp(double t) const;
  /// exp(i t h) m without forming the exponential.
  Matrix apply(double t, const Matrix& m) const;
  double norm() const;
};

/// u(t) = exp(i (t - t0) h) base for t in [t0, t1].
struct PathSegment {
  double t0 = 0.0;
  double t1 = 1.0;
  HermitianMatrix generator;
  UnitaryMatrix base;
  std::shared_ptr<const LowRankSpectrum> spectrum;

  static PathSegment make(double t0, double t1, const HermitianMatrix& h, const UnitaryMatrix& base);
  static PathSegment make(double t0, double t1, const HermitianMatrix& h, const UnitaryMatrix& base,
                          std::shared_ptr<const LowRankSpectrum> spectrum);

  UnitaryMatrix at(double t) const;
  double speed() const { return spectrum->norm(); }
};

class UnitaryPath {
 public:
  /// Validates continuity at joints (1e-10) and u(t_begin) = I when `based`.
  UnitaryPath(std::vector<PathSegment> segments, bool based);

  /// The constant path at u over [0, 1].
  static UnitaryPath constant(const UnitaryMatrix& u);
  static UnitaryPath identity(Index dim);
  /// exp(i t h) for t in [t0, t1], starting at I.
  static UnitaryPath one_parameter(const HermitianMatrix& h, double t0 = 0.0, double t1 = 1.0);
  static UnitaryPath one_parameter(const HermitianMatrix& h, std::shared_ptr<const LowRankSpectrum> s,
                                   double t0 = 0.0, double t1 = 1.0);

  Index dim() const { return segments_.front().base.dim(); }
  double t_begin() const { return segments_.front().t0; }
  double t_end() const { return segments_.back().t1; }
  bool based() const noexcept { return based_; }
  const std::vector<PathSegment>& segments() const noexcept { return segments_; }

  /// Evaluates at t, clamped to [t_begin, t_end].
  UnitaryMatrix at(double t) const;
  UnitaryMatrix end() const { return at(t_end()); }

  /// Sum over segments of duration times generator norm.
  double length() const;
  /// Sum of ||u(t_k) - u(t_{k-1})|| over a uniform partition with `pieces` steps.
  double chord_sum(int pieces) const;

  /// Runs this path, then `next` (a based path) right-multiplied by end();
  /// the second leg's time axis is shifted to start at t_end().
  UnitaryPath then(const UnitaryPath& next) const;
  /// t -> w u(t).
  UnitaryPath left_multiplied(const UnitaryMatrix& w) const;
  /// Affine reparameterization onto [a, b].
  UnitaryPath rescaled(double a, double b) const;

 private:
  std::vector<PathSegment> segments_;
  bool based_;
};

/// Certified length of a path (sum of segment speeds times durations).
inline double path_length(const UnitaryPath& path) { return path.length(); }

}  // namespace state_transport
