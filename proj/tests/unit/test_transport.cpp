#include <gtest/gtest.h>

#include "oracles.hpp"
#include "state_transport/errors.hpp"
#include "state_transport/instances.hpp"
#include "state_transport/random.hpp"
#include "state_transport/transport.hpp"

namespace st = state_transport;
using st::Complex;
using st::Matrix;
using st::Vector;

namespace {

Vector basis(st::Index dim, st::Index i) {
  Vector v = Vector::Zero(dim);
  v(i) = 1.0;
  return v;
}

double sup_commutator(const st::UnitaryPath& path, const Matrix& x, int samples) {
  double worst = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const Matrix u = path.at(path.t_begin() + (path.t_end() - path.t_begin()) * k / samples).matrix();
    worst = std::max(worst, oracle::norm2(u * x - x * u, 300));
  }
  return worst;
}

}  // namespace

TEST(Geodesic, QuarterTurnClosedForm) {
  const Vector xi = basis(3, 0);
  const Vector eta = (basis(3, 0) + Complex(0, 1) * basis(3, 1)) / std::sqrt(2.0);
  EXPECT_NEAR(st::geodesic_angle(xi, eta), st::kPi / 4, 1e-15);
  const st::UnitaryPath p = st::geodesic_pair(st::StateVector::checked(xi), st::StateVector::normalized(eta));
  EXPECT_NEAR(p.length(), st::kPi / 4, 1e-12);
  EXPECT_LT((p.end().matrix() * xi - eta).norm(), 1e-12);
  // Support: the third coordinate is untouched along the whole path.
  EXPECT_LT((p.at(0.37).matrix() * basis(3, 2) - basis(3, 2)).norm(), 1e-14);
}

TEST(Geodesic, PhaseMultipleHasAngleOfThePhase) {
  const Vector xi = basis(2, 1);
  for (double psi : {0.0, 0.4, -2.9}) {
    const Vector eta = std::polar(1.0, psi) * xi;
    EXPECT_NEAR(st::geodesic_angle(xi, eta), std::abs(psi), 1e-12);
    const st::UnitaryPath p = st::geodesic_pair(st::StateVector::checked(xi), st::StateVector::checked(eta));
    EXPECT_NEAR(p.length(), std::abs(psi), 1e-12);
    EXPECT_LT((p.end().matrix() * xi - eta).norm(), 1e-12);
  }
}

TEST(Geodesic, PropertyMinimalAgainstRandomCompetitors) {
  st::Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const st::Index dim = 2 + trial % 5;
    const st::StateVector xi = st::StateVector::normalized(st::random_unit_vector(rng, dim));
    const st::StateVector eta = st::StateVector::normalized(st::random_unit_vector(rng, dim));
    const double theta = std::acos(std::clamp(st::inner(xi.vector(), eta.vector()).real(), -1.0, 1.0));
    const st::UnitaryPath p = st::geodesic_pair(xi, eta, 8);
    EXPECT_NEAR(p.length(), theta, 1e-10);
    EXPECT_LT((oracle::expi(p.segments().front().generator.matrix(), 1.0) * xi.vector() - eta.vector()).norm(), 1e-10);
    const st::LowerBoundCertificate cert = st::geodesic_lower_bound(p, xi, eta, 32);
    EXPECT_GE(cert.phi, theta - 1e-9);
    EXPECT_LE(cert.chord_sum, cert.length + 1e-12);
    // Any exp(ih) mapping xi to eta has ||h|| >= theta.
    for (int c = 0; c < 20; ++c) {
      const Matrix perp = Matrix::Identity(dim, dim) - xi.vector() * xi.vector().adjoint();
      const Matrix fix = perp * st::random_hermitian(rng, dim, rng.uniform(0.0, 2.0)).matrix() * perp;
      const Matrix w = p.end().matrix() * oracle::expi(fix, 1.0);
      const st::HermitianMatrix h = st::spectral_generator(st::UnitaryMatrix::assume_unitary(w));
      EXPECT_GE(st::op_norm(h.matrix()), theta - 1e-9);
    }
  }
}

TEST(Geodesic, LowerBoundRejectsWrongEndpoint) {
  const st::StateVector xi = st::StateVector::checked(basis(2, 0));
  const st::StateVector eta = st::StateVector::checked(basis(2, 1));
  const st::UnitaryPath idle = st::UnitaryPath::identity(2);
  EXPECT_THROW(st::geodesic_lower_bound(idle, xi, eta), st::Error);
}

TEST(SpectrumMatch, DiagonalPairsByNearestEigenvalue) {
  Matrix u = Matrix::Zero(2, 2);
  Matrix v = Matrix::Zero(2, 2);
  u(0, 0) = std::polar(1.0, 0.0);
  u(1, 1) = std::polar(1.0, 2.0);
  v(0, 0) = std::polar(1.0, 0.1);
  v(1, 1) = std::polar(1.0, 2.3);
  const st::UnitaryMatrix uu = st::UnitaryMatrix::checked(u);
  const st::UnitaryMatrix vv = st::UnitaryMatrix::checked(v);
  EXPECT_NEAR(std::abs(st::spectrum_match(uu, vv, u(0, 0)) - v(0, 0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(st::spectrum_match(uu, vv, u(1, 1)) - v(1, 1)), 0.0, 1e-12);
}

TEST(SpectrumMatch, PropertyDistanceBoundedByOperatorNorm) {
  st::Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const st::Index dim = 2 + trial % 5;
    const st::UnitaryMatrix u = st::haar_unitary(rng, dim);
    const st::UnitaryMatrix v = (trial % 2) ? st::haar_unitary(rng, dim)
                                            : u * st::expm_skew(st::random_hermitian(rng, dim, 0.05), 1.0);
    const double dist = oracle::norm2(u.matrix() - v.matrix(), 500);
    const Eigen::ComplexEigenSolver<Matrix> ev(v.matrix());
    for (const Complex lambda : st::unitary_spectrum(u)) {
      const Complex mu = st::spectrum_match(u, v, lambda);
      // mu really is an eigenvalue of v, and the closest one.
      double nearest = 1e9;
      for (st::Index k = 0; k < dim; ++k) nearest = std::min(nearest, std::abs(lambda - ev.eigenvalues()(k)));
      EXPECT_NEAR(std::abs(lambda - mu), nearest, 1e-9);
      EXPECT_LE(std::abs(lambda - mu), dist + 1e-8);
    }
  }
}

TEST(ProjectionTransport, CommutesWithProjectionAndStaysShort) {
  st::Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const st::Index dim = 2 + trial % 6;
    const st::Index rank = 1 + trial % (dim - 1);
    const Matrix q = st::haar_unitary(rng, dim).matrix();
    const Matrix e = q.leftCols(rank) * q.leftCols(rank).adjoint();
    const Vector x = st::random_unit_vector(rng, dim);
    Matrix mix = q.leftCols(rank) * st::haar_unitary(rng, rank).matrix() * q.leftCols(rank).adjoint() +
                 q.rightCols(dim - rank) * st::haar_unitary(rng, dim - rank).matrix() * q.rightCols(dim - rank).adjoint();
    const st::StateVector xi = st::StateVector::normalized(x);
    const st::StateVector eta = st::StateVector::normalized(mix * x);
    const st::ProjectionTransport pt = st::projection_transport(st::HermitianMatrix::symmetrized(e), xi, eta);
    EXPECT_LT(sup_commutator(pt.path, e, 16), 1e-9) << "trial " << trial;
    EXPECT_LE(pt.path.length(), st::kPi / 2 + 1e-8);
    EXPECT_NEAR(std::abs(pt.phase), 1.0, 1e-14);
    EXPECT_LT((pt.path.end().matrix() * x - pt.phase * eta.vector()).norm(), 1e-9);
  }
}

TEST(ProjectionTransport, RejectsDifferentMass) {
  Matrix e = Matrix::Zero(2, 2);
  e(0, 0) = 1.0;
  EXPECT_THROW(st::projection_transport(st::HermitianMatrix::checked(e), st::StateVector::checked(basis(2, 0)),
                                        st::StateVector::checked(basis(2, 1))),
               st::Error);
}

TEST(CommutantDelta, InvertsCertifiedEpsilon) {
  // Terminal error eps needs the alignment of n coordinate columns to be
  // within eps / sqrt(n).
  for (st::Index n : {2, 3}) {
    const double d = st::commutant_delta(n, n, 0.1);
    EXPECT_NEAR(st::certified_epsilon(n, n, d), 0.1 / std::sqrt(double(n)), 1e-14);
  }
}

TEST(CommutantTransport, PropertyCommutesWithUnitsAndMeetsTolerance) {
  st::Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const st::Index n = 2 + trial % 2;
    const double eps = (trial % 4 < 2) ? 0.1 : 0.01;
    const st::CommutantInstance inst = st::commutant_instance(rng, n, n, 0.5 * st::commutant_delta(n, n, eps));
    const double gap = oracle::max_abs(oracle::tensor_statistics(n, n, inst.xi.vector()) -
                                       oracle::tensor_statistics(n, n, inst.eta.vector()));
    const st::CommutantTransport tr = st::commutant_transport(inst.units, inst.xi, inst.eta, eps);
    EXPECT_NEAR(tr.stat_gap, gap, 1e-14);
    EXPECT_LT((tr.path.end().matrix() * inst.xi.vector() - inst.eta.vector()).norm(), eps);
    for (st::Index i = 0; i < n; ++i) {
      for (st::Index j = 0; j < n; ++j) {
        EXPECT_LT(sup_commutator(tr.path, oracle::tensor_unit(n, n, i, j), 8), 1e-9);
      }
    }
    // u_t = sum_i e_i1 exp(itH) e_1i, i.e. I_n (x) exp(itH).
    Matrix expected = Matrix::Zero(n * n, n * n);
    const Matrix corner = oracle::expi(tr.corner.matrix(), 1.0);
    for (st::Index i = 0; i < n; ++i) expected.block(i * n, i * n, n, n) = corner;
    EXPECT_LT((tr.path.end().matrix() - expected).norm(), 1e-10);
  }
}

TEST(CommutantTransport, RepairMakesEndpointExact) {
  st::Rng rng(5);
  const st::CommutantInstance inst = st::commutant_instance(rng, 2, 2, 0.5 * st::commutant_delta(2, 2, 0.1));
  const st::CommutantTransport tr = st::commutant_transport(inst.units, inst.xi, inst.eta, 0.1, true);
  EXPECT_LT((tr.path.end().matrix() * inst.xi.vector() - inst.eta.vector()).norm(), 1e-12);
  EXPECT_LE(tr.repair_length, st::kPi / 2 * tr.terminal_error + 1e-12);
}

TEST(CommutantTransport, RejectsLargeStatisticsGap) {
  const st::MatrixUnits mu = st::MatrixUnits::tensor(2, 4);
  Vector a = Vector::Zero(4);
  a(0) = 1.0;
  Vector b = Vector::Zero(4);
  b(2) = 1.0;
  try {
    st::commutant_transport(mu, st::StateVector::checked(a), st::StateVector::checked(b), 0.1);
    FAIL();
  } catch (const st::Error& e) {
    EXPECT_EQ(e.kind(), st::ErrorKind::kPrecondition);
    EXPECT_NEAR(e.measured(), 1.0, 1e-15);
  }
}

TEST(MultiTransport, DisjointBlocksMoveIndependently) {
  st::Rng rng(6);
  // Two copies of M_2 with multiplicity 2 in C^8: coordinates 0..3 and 4..7.
  const Matrix id = Matrix::Identity(8, 8);
  const st::MatrixUnits a = st::MatrixUnits::from_isometries({id.middleCols(0, 2), id.middleCols(2, 2)});
  const st::MatrixUnits b = st::MatrixUnits::from_isometries({id.middleCols(4, 2), id.middleCols(6, 2)});
  const st::BlockAlgebra alg(8, {a, b});
  auto pair_in = [&](st::Index offset) {
    Vector x = Vector::Zero(8);
    x.segment(offset, 4) = st::random_unit_vector(rng, 4);
    Matrix w = Matrix::Zero(8, 8);
    const Matrix small = st::haar_unitary(rng, 2).matrix();
    w.block(offset, offset, 2, 2) = small;
    w.block(offset + 2, offset + 2, 2, 2) = small;
    return std::pair{st::StateVector::checked(x), st::StateVector::normalized(w * x)};
  };
  const auto p1 = pair_in(0);
  const auto p2 = pair_in(4);
  std::vector<Matrix> F = a.units();
  for (const Matrix& m : b.units()) F.push_back(m);
  const st::MultiTransport mt = st::multi_transport({p1, p2}, alg, F, 0.1);
  ASSERT_EQ(mt.terminal_errors.size(), 2u);
  for (double err : mt.terminal_errors) EXPECT_LT(err, 1e-9);
  EXPECT_LT(mt.max_commutator, 0.2);
  EXPECT_EQ(mt.block_of_pair, (std::vector<st::Index>{0, 1}));
  EXPECT_THROW(st::multi_transport({p1, p1}, alg, F, 0.1), st::Error);
}

TEST(Excision, LocalizesAPureStateOnItsBlock) {
  // xi = e_0 (x) e_0 is pure on M_2 (x) I_2; the excisor is E_00 (x) I_2.
  const st::MatrixUnits mu = st::MatrixUnits::tensor(2, 4);
  const st::BlockAlgebra alg(4, {mu});
  const st::Excision ex = st::excise(st::StateVector::checked(basis(4, 0)), alg, mu.units(), 0.1);
  EXPECT_TRUE(ex.in_algebra);
  EXPECT_LT((ex.e.matrix() - mu.unit(0, 0)).norm(), 1e-12);
  EXPECT_LT(ex.error, 1e-12);
  EXPECT_NEAR(st::inner(ex.e.matrix() * basis(4, 0), basis(4, 0)).real(), 1.0, 1e-12);
}
