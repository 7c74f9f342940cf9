#pragma once

// Dense complex linear algebra shared by every transport construction.
//
// Inner products are linear in the first argument, <x, y> = sum_k x_k conj(y_k),
// so a Gram matrix of columns X is d_ij = <x_i, x_j> = conj(X^* X)_ij.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace state_transport {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;

/// Self-adjoint matrix. Construction either validates or symmetrizes.
class HermitianMatrix {
 public:
  /// Rejects inputs with ||m - m*|| > 1e-12 ||m|| (symmetry-violation).
  static HermitianMatrix checked(Matrix m);
  /// Returns (m + m*)/2; use for values that are Hermitian up to rounding.
  static HermitianMatrix symmetrized(const Matrix& m);
  static HermitianMatrix zero(Index dim);

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }

 private:
  explicit HermitianMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Unitary matrix: ||u*u - I|| and ||uu* - I|| at most 1e-10.
class UnitaryMatrix {
 public:
  static UnitaryMatrix checked(Matrix m);
  /// Skips validation. Only for products/expressions of unitaries.
  static UnitaryMatrix assume_unitary(Matrix m) { return UnitaryMatrix(std::move(m)); }
  static UnitaryMatrix identity(Index dim);

  const Matrix& matrix() const noexcept { return m_; }
  Index dim() const noexcept { return m_.rows(); }
  UnitaryMatrix adjoint() const { return UnitaryMatrix(m_.adjoint()); }

  friend UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b) {
    return UnitaryMatrix(a.m_ * b.m_);
  }

 private:
  explicit UnitaryMatrix(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Unit vector representing the vector state x -> <x xi, xi>.
class StateVector {
 public:
  /// Rejects | ||v|| - 1 | > 1e-12 (not-unit-vector).
  static StateVector checked(Vector v);
  /// Divides by the norm; rejects the zero vector.
  static StateVector normalized(const Vector& v);

  const Vector& vector() const noexcept { return v_; }
  Index dim() const noexcept { return v_.size(); }

 private:
  explicit StateVector(Vector v) : v_(std::move(v)) {}
  Vector v_;
};

struct HermitianEigen {
  RealVector values;  // ascending
  UnitaryMatrix vectors;
};

HermitianEigen eig_hermitian(const HermitianMatrix& h);

/// Spectral square root; eigenvalues in [-1e-8 ||x||, 0) are clamped to 0.
HermitianMatrix psd_sqrt(const HermitianMatrix& x);

/// Unitary factor z |z|^{-1} of the polar decomposition.
UnitaryMatrix polar_unitary(const Matrix& z);

/// exp(i t h).
UnitaryMatrix expm_skew(const HermitianMatrix& h, double t);
UnitaryMatrix expm_skew(const HermitianEigen& spectral, double t);

/// Principal logarithm: returns h with exp(i h) = u and spectrum in (-pi, pi).
/// Fails with branch-cut when some eigenvalue is within 1e-6 (in angle) of -1.
HermitianMatrix logm_unitary(const UnitaryMatrix& u);

/// A generator h with exp(i h) = u and ||h|| <= pi. Eigenvalue -1 maps to +pi.
HermitianMatrix spectral_generator(const UnitaryMatrix& u);

/// Largest singular value.
double op_norm(const Matrix& x);

/// Eigenvalues of a unitary (or any normal) matrix, via the Schur form.
std::vector<Complex> unitary_spectrum(const UnitaryMatrix& u);

/// <x, y>, linear in x.
inline Complex inner(const Vector& x, const Vector& y) { return y.dot(x); }

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

/// ||u x u* - x|| for unitary u.
double ad_displacement(const UnitaryMatrix& u, const Matrix& x);

/// Orthonormal basis (as columns) of the column span of `columns`; singular
/// values at most rel_tol * max(1, sigma_max) are treated as zero.
Matrix range_basis(const Matrix& columns, double rel_tol = 1e-12);

/// Orthonormal basis of the orthogonal complement of the span of `columns`
/// inside C^dim (columns may be empty).
Matrix complement_basis(const Matrix& columns, Index dim, double rel_tol = 1e-12);

/// Closest isometry to a full-column-rank matrix (polar factor of a tall matrix).
Matrix nearest_isometry(const Matrix& a);

}  // namespace state_transport
