#include "state_transport/gram_align.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "state_transport/errors.hpp"

namespace state_transport {
namespace {

constexpr double kRankTol = 1e-13;

Matrix hcat(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

// Any unitary factor of a square matrix (singular inputs allowed).
Matrix unitary_factor(const Matrix& z) {
  if (z.size() == 0) return z;
  Eigen::JacobiSVD<Matrix> svd(z, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

VectorFamily select(const VectorFamily& fam, const std::vector<Index>& idx) {
  Matrix out(fam.dim(), static_cast<Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Index>(k)) = fam.columns().col(idx[k]);
  return VectorFamily(std::move(out));
}

double max_residual(const UnitaryMatrix& u, const VectorFamily& src, const VectorFamily& dst) {
  return (u.matrix() * src.columns() - dst.columns()).colwise().norm().maxCoeff();
}

}  // namespace

VectorFamily::VectorFamily(Matrix columns) : columns_(std::move(columns)) {
  if (!columns_.allFinite()) {
    throw Error(ErrorKind::kInvalidMatrix, "vector family has non-finite entries");
  }
}

VectorFamily VectorFamily::from_vectors(Index dim, const std::vector<Vector>& vectors) {
  Matrix cols(dim, static_cast<Index>(vectors.size()));
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (vectors[k].size() != dim) {
      throw Error(ErrorKind::kInvalidMatrix, "vector length does not match family dimension");
    }
    cols.col(static_cast<Index>(k)) = vectors[k];
  }
  return VectorFamily(std::move(cols));
}

bool VectorFamily::is_normalized() const { return columns_.squaredNorm() <= 1.0 + 1e-12; }

HermitianMatrix gram_matrix(const VectorFamily& fam) {
  return HermitianMatrix::symmetrized((fam.columns().adjoint() * fam.columns()).transpose());
}

double gram_gap(const VectorFamily& a, const VectorFamily& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kPrecondition, "families have different sizes");
  }
  if (a.size() == 0) return 0.0;
  return (gram_matrix(a).matrix() - gram_matrix(b).matrix()).cwiseAbs().maxCoeff();
}

VectorFamily gram_complete(const VectorFamily& fam, const HermitianMatrix& target) {
  if (fam.dim() < fam.size()) {
    std::ostringstream msg;
    msg << "ambient dimension " << fam.dim() << " is below family size " << fam.size();
    throw Error(ErrorKind::kInsufficientDimension, msg.str());
  }
  return gram_complete_avoiding(fam, target, Matrix(fam.dim(), 0));
}

VectorFamily gram_complete_avoiding(const VectorFamily& fam, const HermitianMatrix& target,
                                    const Matrix& avoid) {
  const Index n = fam.size();
  const Index dim = fam.dim();
  if (target.dim() != n) {
    throw Error(ErrorKind::kInvalidTarget, "target size does not match the family");
  }
  if (n == 0) return fam;

  // Work with the transposed (conjugated) Gram matrices so that Y*Y = conj(c).
  const HermitianMatrix c_conj = HermitianMatrix::symmetrized(target.matrix().conjugate());
  const double min_eig = eig_hermitian(c_conj).values(0);
  if (min_eig < -1e-10) {
    throw Error(ErrorKind::kInvalidTarget, "target Gram matrix is not positive semidefinite",
                min_eig);
  }
  const Matrix c_half = psd_sqrt(c_conj).matrix();

  Eigen::BDCSVD<Matrix> svd(fam.columns(), Eigen::ComputeThinU | Eigen::ComputeFullV);
  const RealVector& sigma = svd.singularValues();
  const double cutoff = kRankTol * std::max(1.0, sigma.size() ? sigma(0) : 0.0);
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;

  const Matrix ur = svd.matrixU().leftCols(rank);
  const Matrix vr = svd.matrixV().leftCols(rank);
  const Matrix vperp = svd.matrixV().rightCols(n - rank);

  // Directions of the target that the inputs do not reach.
  const Matrix k = range_basis(vperp * (vperp.adjoint() * c_half));
  Matrix m = ur * vr.adjoint();
  if (k.cols() > 0) {
    const Matrix room = complement_basis(hcat(ur, avoid), dim);
    if (room.cols() < k.cols()) {
      std::ostringstream msg;
      msg << "completion needs " << k.cols() << " new directions, only " << room.cols()
          << " available";
      throw Error(ErrorKind::kInsufficientDimension, msg.str());
    }
    m += room.leftCols(k.cols()) * k.adjoint();
  }
  return VectorFamily(m * c_half);
}

std::vector<Index> greedy_pivot_select(const VectorFamily& fam, Index m) {
  const Index n = fam.size();
  if (m > n || m < 0) {
    throw Error(ErrorKind::kPrecondition, "pivot count exceeds family size");
  }
  std::vector<Index> pivots;
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  Matrix residual = fam.columns();
  for (Index step = 0; step < m; ++step) {
    double best = -1.0;
    for (Index j = 0; j < n; ++j) {
      if (!taken[static_cast<std::size_t>(j)]) best = std::max(best, residual.col(j).norm());
    }
    Index pick = -1;
    for (Index j = 0; j < n && pick < 0; ++j) {
      if (!taken[static_cast<std::size_t>(j)] && residual.col(j).norm() >= best - 1e-12) pick = j;
    }
    taken[static_cast<std::size_t>(pick)] = true;
    pivots.push_back(pick);
    const double norm = residual.col(pick).norm();
    if (norm > 1e-14) {
      const Vector q = residual.col(pick) / norm;
      residual -= q * (q.adjoint() * residual);
    }
  }

  // Exchange refinement: swapping a pivot for a vector whose coefficient
  // exceeds 1 in modulus strictly increases the pivot volume, so this ends.
  for (int iter = 0; iter < 1000 && m > 0; ++iter) {
    const Matrix coef = pivot_coefficients(fam, pivots);
    Index row = 0;
    Index col = 0;
    const double worst = coef.cwiseAbs().maxCoeff(&row, &col);
    if (worst <= 1.0 + 1e-8) break;
    pivots[static_cast<std::size_t>(row)] = col;
  }
  return pivots;
}

Matrix pivot_coefficients(const VectorFamily& fam, const std::vector<Index>& pivots) {
  const VectorFamily basis = select(fam, pivots);
  if (basis.size() == 0) return Matrix(0, fam.size());
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(basis.columns());
  return cod.solve(fam.columns());
}

double certified_epsilon(Index n, Index dim, double delta) {
  if (delta <= 0.0) return 0.0;
  if (dim >= n) return std::sqrt(static_cast<double>(n) * delta);
  const double m = static_cast<double>(dim);
  return m * std::sqrt(m * delta) + (m + 1.0) * std::sqrt(delta);
}

double delta_for_tolerance(Index n, Index dim, double eps) {
  if (eps <= 0.0) return 0.0;
  if (dim >= n) return eps * eps / static_cast<double>(n);
  const double m = static_cast<double>(dim);
  const double root = eps / (m * std::sqrt(m) + m + 1.0);
  return root * root;
}

IsometricExtension extend_isometry(const VectorFamily& src, const VectorFamily& dst) {
  const Index dim = src.dim();
  if (src.size() == 0) return {UnitaryMatrix::identity(dim), Matrix(dim, 0)};

  Eigen::ColPivHouseholderQR<Matrix> qr(src.columns());
  qr.setThreshold(1e-12);
  const Index r = qr.rank();
  if (r == 0) return {UnitaryMatrix::identity(dim), Matrix(dim, 0)};

  const Matrix q_full = qr.householderQ() * Matrix::Identity(dim, r);
  const Matrix r11 = qr.matrixR().topLeftCorner(r, r).triangularView<Eigen::Upper>();
  const Matrix dst_perm = dst.columns() * qr.colsPermutation();
  // Map q_full -> qz: x-pivots = q_full r11 and y-pivots = qz r11.
  const Matrix qz_raw =
      r11.transpose().triangularView<Eigen::Lower>().solve(dst_perm.leftCols(r).transpose()).transpose();
  const Matrix qz = nearest_isometry(qz_raw);

  const Matrix support = range_basis(hcat(q_full, qz));
  const Index s = support.cols();
  const Matrix cx = support * complement_basis(support.adjoint() * q_full, s);
  const Matrix cz = support * complement_basis(support.adjoint() * qz, s);
  Matrix u = Matrix::Identity(dim, dim) - support * support.adjoint() + qz * q_full.adjoint();
  if (cx.cols() > 0 && cx.cols() == cz.cols()) {
    u += cz * unitary_factor(cz.adjoint() * cx) * cx.adjoint();
  }
  return {UnitaryMatrix::assume_unitary(nearest_isometry(u)), support};
}

Alignment align_unitary(const VectorFamily& src, const VectorFamily& dst, double delta) {
  if (src.size() != dst.size() || src.dim() != dst.dim()) {
    throw Error(ErrorKind::kPrecondition, "families differ in size or dimension");
  }
  if (!src.is_normalized() || !dst.is_normalized()) {
    throw Error(ErrorKind::kPrecondition, "families must satisfy sum ||x_i||^2 <= 1");
  }
  const double gap = gram_gap(src, dst);
  if (!(gap < delta)) {
    throw Error(ErrorKind::kPrecondition, "Gram gap is not below delta", gap);
  }
  const Index n = src.size();
  const Index dim = src.dim();

  std::vector<Index> pivots;
  VectorFamily src_p = src;
  VectorFamily dst_p = dst;
  const bool deficient = dim < n;
  if (deficient) {
    pivots = greedy_pivot_select(src, dim);
    src_p = select(src, pivots);
    dst_p = select(dst, pivots);
  } else {
    for (Index i = 0; i < n; ++i) pivots.push_back(i);
  }

  // zeta has exactly the Gram matrix of dst and sits next to src; the
  // isometry zeta -> dst then moves src close to dst.
  const VectorFamily zeta = gram_complete(src_p, gram_matrix(dst_p));
  IsometricExtension ext = extend_isometry(zeta, dst_p);
  const UnitaryMatrix& u = ext.unitary;

  Alignment out{u, gap, max_residual(u, src, dst), certified_epsilon(n, dim, delta), 0.0,
                deficient, pivots, std::move(ext.support)};
  if (deficient) {
    const double m = static_cast<double>(dim);
    out.stated_bound = m * std::sqrt(m * delta) + (m + 1.0) * (m + 1.0) * delta;
  } else {
    out.stated_bound = out.bound;
  }
  return out;
}

}  // namespace state_transport
