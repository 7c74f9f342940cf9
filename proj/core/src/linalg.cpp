#include "state_transport/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "state_transport/errors.hpp"

namespace state_transport {
namespace {

void require_square_finite(const Matrix& m, const char* what) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    std::ostringstream msg;
    msg << what << " must be square with dim >= 1, got " << m.rows() << "x" << m.cols();
    throw Error(ErrorKind::kInvalidMatrix, msg.str());
  }
  if (!m.allFinite()) {
    throw Error(ErrorKind::kInvalidMatrix, std::string(what) + " has non-finite entries");
  }
}

Matrix diagonal_phase(const HermitianEigen& spectral, double t) {
  const Matrix& v = spectral.vectors.matrix();
  Vector phases(spectral.values.size());
  for (Index k = 0; k < phases.size(); ++k) {
    phases(k) = std::polar(1.0, t * spectral.values(k));
  }
  return v * phases.asDiagonal() * v.adjoint();
}

struct NormalSpectrum {
  Matrix vectors;
  Vector values;
};

NormalSpectrum schur_spectrum(const Matrix& u) {
  Eigen::ComplexSchur<Matrix> schur(u);
  return {schur.matrixU(), schur.matrixT().diagonal()};
}

}  // namespace

HermitianMatrix HermitianMatrix::checked(Matrix m) {
  require_square_finite(m, "Hermitian matrix");
  const double asym = op_norm(m - m.adjoint());
  if (asym > 1e-12 * op_norm(m)) {
    throw Error(ErrorKind::kSymmetryViolation, "||h - h*|| exceeds 1e-12 ||h||", asym);
  }
  return HermitianMatrix(std::move(m));
}

HermitianMatrix HermitianMatrix::symmetrized(const Matrix& m) {
  require_square_finite(m, "Hermitian matrix");
  return HermitianMatrix(0.5 * (m + m.adjoint()));
}

HermitianMatrix HermitianMatrix::zero(Index dim) {
  return HermitianMatrix(Matrix::Zero(dim, dim));
}

UnitaryMatrix UnitaryMatrix::checked(Matrix m) {
  require_square_finite(m, "unitary matrix");
  const Matrix id = Matrix::Identity(m.rows(), m.cols());
  const double left = op_norm(m.adjoint() * m - id);
  const double right = op_norm(m * m.adjoint() - id);
  if (std::max(left, right) > 1e-10) {
    throw Error(ErrorKind::kNotUnitary, "||u*u - I|| exceeds 1e-10", std::max(left, right));
  }
  return UnitaryMatrix(std::move(m));
}

UnitaryMatrix UnitaryMatrix::identity(Index dim) {
  return UnitaryMatrix(Matrix::Identity(dim, dim));
}

StateVector StateVector::checked(Vector v) {
  if (v.size() < 1 || !v.allFinite()) {
    throw Error(ErrorKind::kNotUnitVector, "state vector must be finite with dim >= 1");
  }
  const double dev = std::abs(v.norm() - 1.0);
  if (dev > 1e-12) {
    throw Error(ErrorKind::kNotUnitVector, "| ||xi|| - 1 | exceeds 1e-12", dev);
  }
  return StateVector(std::move(v));
}

StateVector StateVector::normalized(const Vector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !v.allFinite()) {
    throw Error(ErrorKind::kNotUnitVector, "cannot normalize a zero or non-finite vector");
  }
  return StateVector(v / n);
}

HermitianEigen eig_hermitian(const HermitianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  return {solver.eigenvalues(), UnitaryMatrix::assume_unitary(solver.eigenvectors())};
}

HermitianMatrix psd_sqrt(const HermitianMatrix& x) {
  const HermitianEigen spectral = eig_hermitian(x);
  const RealVector& lambda = spectral.values;
  const double scale = lambda.cwiseAbs().maxCoeff();
  if (lambda(0) < -1e-8 * scale) {
    throw Error(ErrorKind::kNotPsd, "matrix has a significantly negative eigenvalue", lambda(0));
  }
  // Eigenvalues at roundoff level are zero; their square roots would not be.
  const double floor = 16.0 * std::numeric_limits<double>::epsilon() *
                       static_cast<double>(lambda.size()) * scale;
  RealVector roots = lambda.unaryExpr([floor](double l) { return l > floor ? std::sqrt(l) : 0.0; });
  const Matrix& v = spectral.vectors.matrix();
  return HermitianMatrix::symmetrized(v * roots.cast<Complex>().asDiagonal() * v.adjoint());
}

UnitaryMatrix polar_unitary(const Matrix& z) {
  require_square_finite(z, "polar input");
  Eigen::JacobiSVD<Matrix> svd(z, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smallest = svd.singularValues()(svd.singularValues().size() - 1);
  if (smallest <= 1e-10) {
    throw Error(ErrorKind::kRankDeficient, "polar decomposition of a singular matrix", smallest);
  }
  return UnitaryMatrix::assume_unitary(svd.matrixU() * svd.matrixV().adjoint());
}

UnitaryMatrix expm_skew(const HermitianMatrix& h, double t) {
  return expm_skew(eig_hermitian(h), t);
}

UnitaryMatrix expm_skew(const HermitianEigen& spectral, double t) {
  return UnitaryMatrix::assume_unitary(diagonal_phase(spectral, t));
}

HermitianMatrix logm_unitary(const UnitaryMatrix& u) {
  const NormalSpectrum s = schur_spectrum(u.matrix());
  RealVector angles(s.values.size());
  for (Index k = 0; k < angles.size(); ++k) {
    angles(k) = std::arg(s.values(k));
    if (kPi - std::abs(angles(k)) < 1e-6) {
      throw Error(ErrorKind::kBranchCut, "spectrum touches -1; principal log undefined",
                  angles(k));
    }
  }
  return HermitianMatrix::symmetrized(s.vectors * angles.cast<Complex>().asDiagonal() *
                                      s.vectors.adjoint());
}

HermitianMatrix spectral_generator(const UnitaryMatrix& u) {
  const NormalSpectrum s = schur_spectrum(u.matrix());
  RealVector angles(s.values.size());
  for (Index k = 0; k < angles.size(); ++k) angles(k) = std::arg(s.values(k));
  return HermitianMatrix::symmetrized(s.vectors * angles.cast<Complex>().asDiagonal() *
                                      s.vectors.adjoint());
}

double op_norm(const Matrix& x) {
  if (x.size() == 0) return 0.0;
  if (std::min(x.rows(), x.cols()) < 48) {
    Eigen::BDCSVD<Matrix> svd(x);
    return svd.singularValues()(0);
  }
  // Largest eigenvalue of the smaller Gram matrix; the top eigenvalue keeps
  // full relative accuracy, so its root does too.
  const Matrix g = x.rows() < x.cols() ? Matrix(x * x.adjoint()) : Matrix(x.adjoint() * x);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues()(eig.eigenvalues().size() - 1)));
}

std::vector<Complex> unitary_spectrum(const UnitaryMatrix& u) {
  const Vector values = schur_spectrum(u.matrix()).values;
  return {values.data(), values.data() + values.size()};
}

double ad_displacement(const UnitaryMatrix& u, const Matrix& x) {
  // ||u x u* - x|| = ||u x - x u||
  return op_norm(u.matrix() * x - x * u.matrix());
}

Matrix range_basis(const Matrix& columns, double rel_tol) {
  if (columns.cols() == 0 || columns.rows() == 0) return Matrix(columns.rows(), 0);
  Eigen::BDCSVD<Matrix> svd(columns, Eigen::ComputeThinU);
  const RealVector& sigma = svd.singularValues();
  const double cutoff = rel_tol * std::max(1.0, sigma(0));
  Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;
  return svd.matrixU().leftCols(rank);
}

Matrix complement_basis(const Matrix& columns, Index dim, double rel_tol) {
  const Matrix basis = columns.cols() == 0 ? Matrix(dim, 0) : range_basis(columns, rel_tol);
  if (basis.cols() == 0) return Matrix::Identity(dim, dim);
  Eigen::HouseholderQR<Matrix> qr(basis);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  return q.rightCols(dim - basis.cols());
}

Matrix nearest_isometry(const Matrix& a) {
  if (a.cols() == 0) return a;
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace state_transport
