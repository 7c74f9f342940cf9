#include <gtest/gtest.h>

#include "oracles.hpp"
#include "state_transport/errors.hpp"
#include "state_transport/matrix_units.hpp"
#include "state_transport/random.hpp"

namespace st = state_transport;
using st::Matrix;

TEST(MatrixUnits, TensorUnitsMatchExplicitKronecker) {
  const st::MatrixUnits mu = st::MatrixUnits::tensor(3, 12);
  EXPECT_EQ(mu.n(), 3);
  EXPECT_EQ(mu.multiplicity(), 4);
  for (st::Index i = 0; i < 3; ++i) {
    for (st::Index j = 0; j < 3; ++j) EXPECT_EQ(mu.unit(i, j), oracle::tensor_unit(3, 4, i, j));
  }
  EXPECT_EQ(mu.identity(), Matrix::Identity(12, 12));
  EXPECT_LT(mu.relation_residual(), 1e-15);
  EXPECT_EQ(mu.units().size(), 9u);
  EXPECT_EQ(mu.units()[5], mu.unit(1, 2));
}

TEST(MatrixUnits, FromIsometriesValidatesOrthogonality) {
  st::Rng rng(1);
  const Matrix q = st::haar_unitary(rng, 6).matrix();
  const st::MatrixUnits mu = st::MatrixUnits::from_isometries({q.leftCols(2), q.middleCols(2, 2)});
  EXPECT_LT(mu.relation_residual(), 1e-12);
  EXPECT_LT((mu.identity() - q.leftCols(4) * q.leftCols(4).adjoint()).norm(), 1e-12);
  // Overlapping ranges are rejected.
  EXPECT_THROW(st::MatrixUnits::from_isometries({q.leftCols(2), q.middleCols(1, 2)}), st::Error);
}

TEST(MatrixUnits, StatisticsMatchExplicitExpectations) {
  st::Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const st::Index n = 2 + trial % 3;
    const st::Index k = 1 + trial % 4;
    const st::MatrixUnits mu = st::MatrixUnits::tensor(n, n * k);
    const st::Vector v = st::random_unit_vector(rng, n * k);
    EXPECT_LT(oracle::max_abs(st::unit_statistics(mu, v) - oracle::tensor_statistics(n, k, v)), 1e-14);
    const st::Vector w = st::random_unit_vector(rng, n * k);
    const double gap = oracle::max_abs(oracle::tensor_statistics(n, k, v) - oracle::tensor_statistics(n, k, w));
    EXPECT_NEAR(st::statistics_gap(mu, v, w), gap, 1e-14);
  }
}

TEST(BlockAlgebra, UnitProjectionCoversEveryBlock) {
  st::Rng rng(3);
  const Matrix q = st::haar_unitary(rng, 7).matrix();
  const st::MatrixUnits a = st::MatrixUnits::from_isometries({q.col(0), q.col(1)});
  const st::MatrixUnits b = st::MatrixUnits::from_isometries({q.middleCols(2, 2), q.middleCols(4, 2)});
  const st::BlockAlgebra alg(7, {a, b});
  const Matrix p = alg.unit_projection();
  EXPECT_LT((p - q.leftCols(6) * q.leftCols(6).adjoint()).norm(), 1e-12);
  // Overlapping blocks violate disjointness.
  EXPECT_THROW(st::BlockAlgebra(7, {a, a}), st::Error);
}
