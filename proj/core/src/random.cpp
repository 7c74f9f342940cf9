#include "state_transport/random.hpp"

#include <Eigen/QR>

namespace state_transport {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix ginibre(Rng& rng, Index rows, Index cols) {
  Matrix g(rows, cols);
  // Column-major fill keeps the draw order independent of Eigen internals.
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.complex_normal();
  }
  return g;
}

Vector random_unit_vector(Rng& rng, Index dim) {
  Vector v = ginibre(rng, dim, 1).col(0);
  return v / v.norm();
}

UnitaryMatrix haar_unitary(Rng& rng, Index dim) {
  const Matrix g = ginibre(rng, dim, dim);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  return UnitaryMatrix::checked(std::move(q));
}

HermitianMatrix random_hermitian(Rng& rng, Index dim, double norm) {
  const Matrix g = ginibre(rng, dim, dim);
  Matrix h = 0.5 * (g + g.adjoint());
  const double n = op_norm(h);
  if (n > 0.0) h *= norm / n;
  return HermitianMatrix::symmetrized(h);
}

HermitianMatrix random_density(Rng& rng, Index dim, Index rank) {
  const Matrix g = ginibre(rng, dim, rank);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return HermitianMatrix::symmetrized(rho);
}

}  // namespace state_transport
