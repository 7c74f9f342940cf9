#pragma once

// Explicit matrix units of a full matrix block M_n sitting inside C^D, and
// direct sums of such blocks.

#include <vector>

#include "state_transport/linalg.hpp"

namespace state_transport {

/// A copy of M_n inside M_D described by isometries V_1..V_n : C^k -> C^D with
/// pairwise orthogonal ranges, so that e_ij = V_i V_j^*. k is the multiplicity.
class MatrixUnits {
 public:
  /// E_ij (x) I_{D/n}; the basis index (i, a) maps to i * (D/n) + a.
  static MatrixUnits tensor(Index n, Index ambient_dim);
  /// Validates that the isometries have orthonormal, mutually orthogonal columns.
  static MatrixUnits from_isometries(std::vector<Matrix> isometries);

  Index n() const noexcept { return static_cast<Index>(isometries_.size()); }
  Index ambient_dim() const noexcept { return isometries_.empty() ? 0 : isometries_[0].rows(); }
  Index multiplicity() const noexcept { return isometries_.empty() ? 0 : isometries_[0].cols(); }
  const Matrix& isometry(Index i) const { return isometries_[static_cast<std::size_t>(i)]; }

  Matrix unit(Index i, Index j) const;
  /// sum_i e_ii.
  Matrix identity() const;
  /// All n^2 units, row-major in (i, j).
  std::vector<Matrix> units() const;
  /// max over (i,j,k,l) of ||e_ij e_kl - delta_jk e_il||.
  double relation_residual() const;

 private:
  explicit MatrixUnits(std::vector<Matrix> isometries) : isometries_(std::move(isometries)) {}
  std::vector<Matrix> isometries_;
};

/// Direct sum of full blocks with pairwise orthogonal identities in C^D.
class BlockAlgebra {
 public:
  BlockAlgebra(Index ambient_dim, std::vector<MatrixUnits> blocks);

  Index ambient_dim() const noexcept { return ambient_dim_; }
  const std::vector<MatrixUnits>& blocks() const noexcept { return blocks_; }
  /// Projection onto the span of all block identities.
  Matrix unit_projection() const;

 private:
  Index ambient_dim_;
  std::vector<MatrixUnits> blocks_;
};

/// Statistics <e_ij v, v> of a vector state on the block, as an n x n matrix.
Matrix unit_statistics(const MatrixUnits& mu, const Vector& v);
/// max_ij |<e_ij a, a> - <e_ij b, b>|.
double statistics_gap(const MatrixUnits& mu, const Vector& a, const Vector& b);

}  // namespace state_transport
