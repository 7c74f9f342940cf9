#pragma once

// Gram-matrix completion and alignment of vector families.

#include <vector>

#include "state_transport/linalg.hpp"

namespace state_transport {

/// A finite family of vectors in C^dim, stored as the columns of a matrix.
class VectorFamily {
 public:
  VectorFamily() = default;
  explicit VectorFamily(Matrix columns);
  static VectorFamily from_vectors(Index dim, const std::vector<Vector>& vectors);

  Index dim() const noexcept { return columns_.rows(); }
  Index size() const noexcept { return columns_.cols(); }
  const Matrix& columns() const noexcept { return columns_; }
  Vector operator[](Index i) const { return columns_.col(i); }

  /// Sum of squared norms is at most 1 + 1e-12.
  bool is_normalized() const;

 private:
  Matrix columns_;
};

/// d_ij = <x_i, x_j>.
HermitianMatrix gram_matrix(const VectorFamily& fam);

/// Vectors eta_i with <eta_i, eta_j> = c_ij and
/// ||eta_i - xi_i||^2 = ((c^1/2 - d^1/2)^2)_ii, built inside the span of the
/// inputs (enlarged when the inputs are dependent).
/// Throws insufficient-dimension when dim < n and invalid-target when c is
/// not PSD within 1e-10 or has the wrong size.
VectorFamily gram_complete(const VectorFamily& fam, const HermitianMatrix& target);

/// Same as gram_complete, but any directions added to enlarge the span are
/// taken orthogonal to the columns of `avoid`. Only checks that the room it
/// actually needs exists.
VectorFamily gram_complete_avoiding(const VectorFamily& fam, const HermitianMatrix& target,
                                    const Matrix& avoid);

/// Greedy max-residual pivots followed by exchange refinement, so that every
/// remaining vector expands over the pivots with coefficients of modulus at
/// most 1 + 1e-8. Indices are zero-based, in selection order.
std::vector<Index> greedy_pivot_select(const VectorFamily& fam, Index m);

/// Least-squares coefficients of every family member over the given pivots
/// (column j holds the coefficients of vector j).
Matrix pivot_coefficients(const VectorFamily& fam, const std::vector<Index>& pivots);

/// max_ij |<x_i, x_j> - <y_i, y_j>|.
double gram_gap(const VectorFamily& a, const VectorFamily& b);

/// Certified alignment tolerance for families of size n in C^dim whose Gram
/// matrices differ entrywise by less than delta. Full rank: sqrt(n delta).
/// Rank deficient (dim = m < n): m sqrt(m delta) + (m+1) sqrt(delta), since
/// the non-pivot defect ||y_j - sum_k c_jk y_k||^2 is at most (m+1)^2 delta.
double certified_epsilon(Index n, Index dim, double delta);

/// Largest delta with certified_epsilon(n, dim, delta) <= eps.
double delta_for_tolerance(Index n, Index dim, double eps);

struct Alignment {
  UnitaryMatrix unitary;
  double gram_gap = 0.0;
  double max_residual = 0.0;
  double bound = 0.0;
  /// Loose bound printed in the rank-deficient proof, m eps + (m+1)^2 delta,
  /// for comparison with `bound`. Equals `bound` in the full-rank case.
  double stated_bound = 0.0;
  bool rank_deficient = false;
  std::vector<Index> pivots;
  /// Orthonormal columns; the unitary is the identity on their complement.
  Matrix support;
};

/// Unitary U with ||U x_i - y_i|| within the certified tolerance.
/// Throws precondition (measured = gap) when the Gram gap is not below delta.
Alignment align_unitary(const VectorFamily& src, const VectorFamily& dst, double delta);

/// Unitary mapping x_i to y_i exactly when the two Gram matrices agree, acting
/// as the identity away from span{x_i} + span{y_i}. Returned together with an
/// orthonormal basis of a subspace outside of which it is the identity.
struct IsometricExtension {
  UnitaryMatrix unitary;
  Matrix support;  // dim x s orthonormal columns
};
IsometricExtension extend_isometry(const VectorFamily& src, const VectorFamily& dst);

}  // namespace state_transport
