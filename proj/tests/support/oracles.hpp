#pragma once

// Reference computations that share no code with the library: they use
// textbook iterations instead of the eigen-decompositions the library relies
// on, so agreement between the two is meaningful.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "state_transport/linalg.hpp"
#include "state_transport/random.hpp"

namespace oracle {

using state_transport::Complex;
using state_transport::Index;
using state_transport::Matrix;
using state_transport::Vector;

inline double frobenius_one_norm(const Matrix& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

/// exp(a) by scaling and squaring with a 30-term Taylor series.
inline Matrix expm(const Matrix& a) {
  int squarings = 0;
  double norm = a.size() ? frobenius_one_norm(a) : 0.0;
  while (norm > 0.25) {
    norm /= 2.0;
    ++squarings;
  }
  const Matrix scaled = a / std::ldexp(1.0, squarings);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// exp(i t h).
inline Matrix expi(const Matrix& h, double t) { return expm(Complex(0.0, t) * h); }

/// Principal square root of a positive definite matrix (Denman-Beavers).
inline Matrix sqrtm_pd(const Matrix& a) {
  Matrix y = a;
  Matrix z = Matrix::Identity(a.rows(), a.cols());
  for (int it = 0; it < 100; ++it) {
    const Matrix yn = 0.5 * (y + z.inverse());
    const Matrix zn = 0.5 * (z + y.inverse());
    const double change = (yn - y).norm();
    y = yn;
    z = zn;
    if (change < 1e-15 * std::max(1.0, y.norm())) break;
  }
  return y;
}

/// Largest singular value by power iteration on a^* a, seeded with a fixed
/// vector so that runs are reproducible.
inline double norm2(const Matrix& a, int iterations = 2000) {
  if (a.size() == 0) return 0.0;
  Vector v = Vector::Ones(a.cols()) + Complex(0.0, 0.37) * Vector::LinSpaced(a.cols(), 0.0, 1.0);
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Vector w = a.adjoint() * (a * v);
    const double n = w.norm();
    if (n == 0.0) return 0.0;
    v = w / n;
    sigma = std::sqrt(n);
  }
  return sigma;
}

/// The matrix unit E_ij (x) I_k of M_n (x) M_k.
inline Matrix tensor_unit(Index n, Index k, Index i, Index j) {
  Matrix e = Matrix::Zero(n * k, n * k);
  for (Index a = 0; a < k; ++a) e(i * k + a, j * k + a) = 1.0;
  return e;
}

/// <E_ij v, v> for the tensor block M_n (x) I_k, from explicit matrices.
inline Matrix tensor_statistics(Index n, Index k, const Vector& v) {
  Matrix s(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) s(i, j) = v.dot(tensor_unit(n, k, i, j) * v);
  }
  return s;
}

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// Is u unitary to within tol?
inline double unitarity_defect(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).norm();
}

}  // namespace oracle
