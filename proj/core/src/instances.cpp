#include "state_transport/instances.hpp"

#include <algorithm>
#include <numeric>

#include "state_transport/errors.hpp"

namespace state_transport {

VectorFamily random_family(Rng& rng, Index dim, Index n, Index rank) {
  const Index r = std::max<Index>(1, std::min({rank, n, dim}));
  Matrix x = ginibre(rng, dim, r) * ginibre(rng, r, n);
  x /= x.norm();
  return VectorFamily(std::move(x));
}

namespace {

Matrix block_diagonal(Index n, const Matrix& w) {
  const Index k = w.rows();
  Matrix out = Matrix::Zero(n * k, n * k);
  for (Index i = 0; i < n; ++i) out.block(i * k, i * k, k, k) = w;
  return out;
}

}  // namespace

CommutantInstance commutant_instance(Rng& rng, Index n, Index k, double max_gap) {
  MatrixUnits mu = MatrixUnits::tensor(n, n * k);
  const Vector xi = random_unit_vector(rng, n * k);
  const Vector base = block_diagonal(n, haar_unitary(rng, k).matrix()) * xi;
  const Vector dir = random_unit_vector(rng, n * k);
  double t = 1e-2;
  Vector eta = base;
  for (int it = 0; it < 200; ++it) {
    eta = (base + t * dir).normalized();
    if (statistics_gap(mu, xi, eta) <= max_gap) break;
    t *= 0.25;
    eta = base;
  }
  return {std::move(mu), StateVector::normalized(xi), StateVector::normalized(eta)};
}

CircleInstance circle_instance(Rng& rng, Index n, int atoms) {
  std::vector<Index> mult;
  for (int a = 0; a < atoms; ++a) mult.push_back(rng.integer(2, 4));
  const Index k = std::accumulate(mult.begin(), mult.end(), Index{0});
  const Index dim = n * k;
  const Matrix frame = haar_unitary(rng, k).matrix();
  std::vector<double> angles;
  std::vector<Matrix> bases;
  Matrix w = Matrix::Zero(k, k);
  Index at = 0;
  for (int a = 0; a < atoms; ++a) {
    const Matrix local = frame.middleCols(at, mult[static_cast<std::size_t>(a)]);
    w += local * haar_unitary(rng, local.cols()).matrix() * local.adjoint();
    Matrix lifted = Matrix::Zero(dim, n * local.cols());
    for (Index i = 0; i < n; ++i) {
      lifted.block(i * k, i * local.cols(), k, local.cols()) = local;
    }
    angles.push_back(rng.uniform());
    bases.push_back(std::move(lifted));
    at += local.cols();
  }
  SpectralModel model = SpectralModel::from_atoms(std::move(angles), std::move(bases));
  const Vector xi = random_unit_vector(rng, dim);
  const Vector eta = block_diagonal(n, w) * xi;
  return {MatrixUnits::tensor(n, dim), std::move(model), StateVector::normalized(xi),
          StateVector::normalized(eta)};
}

GroupInstance padded_group_instance(Rng& rng, Index m) {
  const UnitaryMatrix u = haar_unitary(rng, m);
  Eigen::ComplexSchur<Matrix> schur(u.matrix());
  const Matrix q = schur.matrixU();
  Vector phases(m);
  for (Index i = 0; i < m; ++i) phases(i) = std::polar(1.0, 2 * kPi * rng.uniform());
  const Matrix w = q * phases.asDiagonal() * q.adjoint();

  Matrix big = Matrix::Zero(2 * m, 2 * m);
  big.topLeftCorner(m, m) = u.matrix();
  big.bottomRightCorner(m, m) = u.matrix();
  const Vector x = random_unit_vector(rng, m);
  Vector xi = Vector::Zero(2 * m);
  Vector eta = Vector::Zero(2 * m);
  xi.head(m) = x;
  eta.tail(m) = w * x;
  return {GroupAction::lattice({UnitaryMatrix::checked(big)}), StateVector::normalized(xi),
          StateVector::normalized(eta), u};
}

IntertwineInstance intertwine_instance(Rng& rng, const std::vector<Index>& branching,
                                       double noise) {
  Index dim = 1;
  for (Index b : branching) dim *= b;
  AlgebraTower tower = build_tower(branching, dim);
  const Index n1 = branching.front();
  const Vector xi = random_unit_vector(rng, dim);
  const Matrix v = block_diagonal(n1, haar_unitary(rng, dim / n1).matrix());
  Vector eta = v.adjoint() * xi;
  if (noise > 0.0) eta = (eta + noise * random_unit_vector(rng, dim)).normalized();
  std::vector<Matrix> F = tower.level(1).units();
  return {std::move(tower), StateVector::normalized(xi), StateVector::normalized(eta), std::move(F)};
}

}  // namespace state_transport
