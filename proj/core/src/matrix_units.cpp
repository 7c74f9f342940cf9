#include "state_transport/matrix_units.hpp"

#include <algorithm>
#include <sstream>

#include "state_transport/errors.hpp"

namespace state_transport {

MatrixUnits MatrixUnits::tensor(Index n, Index ambient_dim) {
  if (n < 1 || ambient_dim < 1 || ambient_dim % n != 0) {
    std::ostringstream msg;
    msg << "block size " << n << " does not divide ambient dimension " << ambient_dim;
    throw Error(ErrorKind::kTowerSpec, msg.str());
  }
  const Index k = ambient_dim / n;
  std::vector<Matrix> iso;
  iso.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Matrix v = Matrix::Zero(ambient_dim, k);
    v.block(i * k, 0, k, k).setIdentity();
    iso.push_back(std::move(v));
  }
  return MatrixUnits(std::move(iso));
}

MatrixUnits MatrixUnits::from_isometries(std::vector<Matrix> isometries) {
  if (isometries.empty()) {
    throw Error(ErrorKind::kInvalidMatrix, "matrix units need at least one isometry");
  }
  const Index d = isometries[0].rows();
  const Index k = isometries[0].cols();
  for (const Matrix& v : isometries) {
    if (v.rows() != d || v.cols() != k || k < 1) {
      throw Error(ErrorKind::kInvalidMatrix, "isometries must share shape D x k");
    }
  }
  for (std::size_t i = 0; i < isometries.size(); ++i) {
    for (std::size_t j = 0; j < isometries.size(); ++j) {
      const Matrix expected = i == j ? Matrix(Matrix::Identity(k, k)) : Matrix(Matrix::Zero(k, k));
      const double err = op_norm(isometries[i].adjoint() * isometries[j] - expected);
      if (err > 1e-10) {
        throw Error(ErrorKind::kInvalidMatrix, "isometries are not orthonormal", err);
      }
    }
  }
  return MatrixUnits(std::move(isometries));
}

Matrix MatrixUnits::unit(Index i, Index j) const { return isometry(i) * isometry(j).adjoint(); }

Matrix MatrixUnits::identity() const {
  Matrix p = Matrix::Zero(ambient_dim(), ambient_dim());
  for (const Matrix& v : isometries_) p += v * v.adjoint();
  return p;
}

std::vector<Matrix> MatrixUnits::units() const {
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(n() * n()));
  for (Index i = 0; i < n(); ++i) {
    for (Index j = 0; j < n(); ++j) out.push_back(unit(i, j));
  }
  return out;
}

double MatrixUnits::relation_residual() const {
  // e_ij e_kl - delta_jk e_il = V_i (V_j^* V_k - delta_jk) V_l^* and the outer
  // factors are isometries, so the residual is read off the k x k blocks.
  double worst = 0.0;
  const Index k = multiplicity();
  for (Index j = 0; j < n(); ++j) {
    for (Index l = 0; l < n(); ++l) {
      Matrix g = isometry(j).adjoint() * isometry(l);
      if (j == l) g -= Matrix::Identity(k, k);
      worst = std::max(worst, op_norm(g));
    }
  }
  return worst;
}

BlockAlgebra::BlockAlgebra(Index ambient_dim, std::vector<MatrixUnits> blocks)
    : ambient_dim_(ambient_dim), blocks_(std::move(blocks)) {
  for (const MatrixUnits& b : blocks_) {
    if (b.ambient_dim() != ambient_dim_) {
      throw Error(ErrorKind::kInvalidMatrix, "block ambient dimension mismatch");
    }
  }
  for (std::size_t a = 0; a < blocks_.size(); ++a) {
    for (std::size_t b = a + 1; b < blocks_.size(); ++b) {
      const double overlap = op_norm(blocks_[a].identity() * blocks_[b].identity());
      if (overlap > 1e-10) {
        throw Error(ErrorKind::kDisjointness, "block identities are not orthogonal", overlap);
      }
    }
  }
}

Matrix BlockAlgebra::unit_projection() const {
  Matrix p = Matrix::Zero(ambient_dim_, ambient_dim_);
  for (const MatrixUnits& b : blocks_) p += b.identity();
  return p;
}

Matrix unit_statistics(const MatrixUnits& mu, const Vector& v) {
  Matrix coords(mu.multiplicity(), mu.n());
  for (Index i = 0; i < mu.n(); ++i) coords.col(i) = mu.isometry(i).adjoint() * v;
  return coords.adjoint() * coords;
}

double statistics_gap(const MatrixUnits& mu, const Vector& a, const Vector& b) {
  return (unit_statistics(mu, a) - unit_statistics(mu, b)).cwiseAbs().maxCoeff();
}

}  // namespace state_transport
