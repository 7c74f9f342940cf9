#include <gtest/gtest.h>

#include "oracles.hpp"
#include "state_transport/errors.hpp"
#include "state_transport/linalg.hpp"
#include "state_transport/random.hpp"

namespace st = state_transport;
using st::Complex;
using st::Matrix;
using st::Vector;

namespace {

st::ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const st::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an st::Error";
  return st::ErrorKind::kCertification;
}

}  // namespace

TEST(Linalg, InnerProductIsLinearInFirstArgument) {
  Vector x(2), y(2);
  x << Complex(1, 0), Complex(0, 1);
  y << Complex(0, 1), Complex(1, 0);
  const Complex a(0.3, -2.0);
  EXPECT_NEAR(std::abs(st::inner(a * x, y) - a * st::inner(x, y)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(st::inner(x, a * y) - std::conj(a) * st::inner(x, y)), 0.0, 1e-15);
  // <x, y> = x_1 conj(y_1) + x_2 conj(y_2) = 1 * (-i) + i * 1 = 0.
  EXPECT_NEAR(std::abs(st::inner(x, y)), 0.0, 1e-15);
}

TEST(Linalg, CheckedConstructorsRejectBadInput) {
  Matrix m(2, 2);
  m << 1, 2, 0, 1;
  EXPECT_EQ(kind_of([&] { st::HermitianMatrix::checked(m); }), st::ErrorKind::kSymmetryViolation);
  EXPECT_EQ(kind_of([&] { st::UnitaryMatrix::checked(m); }), st::ErrorKind::kNotUnitary);
  Vector v = Vector::Ones(3);
  EXPECT_EQ(kind_of([&] { st::StateVector::checked(v); }), st::ErrorKind::kNotUnitVector);
  EXPECT_NO_THROW(st::StateVector::normalized(v));
  Matrix nan = Matrix::Identity(2, 2);
  nan(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(kind_of([&] { st::HermitianMatrix::checked(nan); }), st::ErrorKind::kInvalidMatrix);
}

TEST(Linalg, ExpSkewAgreesWithTaylorOracle) {
  st::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto dim = static_cast<st::Index>(1 + trial % 7);
    const st::HermitianMatrix h = st::random_hermitian(rng, dim, rng.uniform(0.1, 4.0));
    const double t = rng.uniform(-2.0, 2.0);
    const Matrix lib = st::expm_skew(h, t).matrix();
    EXPECT_LT((lib - oracle::expi(h.matrix(), t)).norm(), 1e-12) << "trial " << trial;
    EXPECT_LT(oracle::unitarity_defect(lib), 1e-12);
  }
}

TEST(Linalg, PsdSqrtAgreesWithDenmanBeavers) {
  st::Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto dim = static_cast<st::Index>(1 + trial % 6);
    const Matrix g = st::ginibre(rng, dim, dim);
    const Matrix a = g * g.adjoint() + 0.1 * Matrix::Identity(dim, dim);
    const Matrix lib = st::psd_sqrt(st::HermitianMatrix::symmetrized(a)).matrix();
    EXPECT_LT((lib - oracle::sqrtm_pd(a)).norm(), 1e-10 * a.norm()) << "trial " << trial;
  }
}

TEST(Linalg, PsdSqrtTreatsRoundoffAsZero) {
  // Rank-one projector: the square root is the projector itself, with no
  // sqrt(1e-16) sized contributions from the numerically-zero eigenvalues.
  Vector v(3);
  v << 1.0, Complex(0.0, 2.0), -1.0;
  v.normalize();
  const Matrix p = v * v.adjoint();
  const Matrix r = st::psd_sqrt(st::HermitianMatrix::symmetrized(p)).matrix();
  EXPECT_LT((r - p).norm(), 1e-14);
}

TEST(Linalg, PsdSqrtRejectsNegativeMatrices) {
  Matrix m = Matrix::Identity(2, 2);
  m(1, 1) = -0.5;
  EXPECT_EQ(kind_of([&] { st::psd_sqrt(st::HermitianMatrix::checked(m)); }), st::ErrorKind::kNotPsd);
}

TEST(Linalg, PolarUnitaryMatchesSqrtFormula) {
  st::Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const auto dim = static_cast<st::Index>(2 + trial % 5);
    const Matrix z = st::ginibre(rng, dim, dim);
    // z (z^* z)^{-1/2}
    const Matrix expected = z * oracle::sqrtm_pd(z.adjoint() * z).inverse();
    EXPECT_LT((st::polar_unitary(z).matrix() - expected).norm(), 1e-9);
  }
}

TEST(Linalg, LogarithmInvertsExponential) {
  st::Rng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const st::HermitianMatrix h = st::random_hermitian(rng, 4, rng.uniform(0.1, 2.5));
    const st::HermitianMatrix back = st::logm_unitary(st::expm_skew(h, 1.0));
    EXPECT_LT((back.matrix() - h.matrix()).norm(), 1e-10);
  }
}

TEST(Linalg, LogarithmRefusesTheBranchCut) {
  Matrix u = Matrix::Identity(2, 2);
  u(0, 0) = -1.0;
  EXPECT_EQ(kind_of([&] { st::logm_unitary(st::UnitaryMatrix::checked(u)); }), st::ErrorKind::kBranchCut);
  // The spectral generator takes -1 to +pi instead.
  const st::HermitianMatrix h = st::spectral_generator(st::UnitaryMatrix::checked(u));
  EXPECT_NEAR(st::op_norm(h.matrix()), st::kPi, 1e-12);
  EXPECT_LT((oracle::expi(h.matrix(), 1.0) - u).norm(), 1e-12);
}

TEST(Linalg, OperatorNormAgreesWithPowerIteration) {
  st::Rng rng(15);
  for (st::Index dim : {1, 3, 8, 47, 48, 64}) {
    const Matrix a = st::ginibre(rng, dim, dim + 2);
    EXPECT_NEAR(st::op_norm(a), oracle::norm2(a), 1e-8 * oracle::norm2(a)) << "dim " << dim;
  }
  // Both branches keep relative accuracy on tiny matrices.
  const Matrix tiny = 1e-17 * st::ginibre(rng, 64, 64);
  EXPECT_NEAR(st::op_norm(tiny) / oracle::norm2(tiny), 1.0, 1e-8);
}

TEST(Linalg, RangeAndComplementBasesAreOrthonormalAndComplementary) {
  st::Rng rng(16);
  const Matrix cols = st::ginibre(rng, 6, 2) * st::ginibre(rng, 2, 4);  // rank 2
  const Matrix q = st::range_basis(cols);
  ASSERT_EQ(q.cols(), 2);
  EXPECT_LT(oracle::unitarity_defect(q), 1e-12);
  EXPECT_LT((q * q.adjoint() * cols - cols).norm(), 1e-12);
  const Matrix c = st::complement_basis(cols, 6);
  ASSERT_EQ(c.cols(), 4);
  EXPECT_LT(oracle::max_abs(c.adjoint() * q), 1e-12);
}

TEST(Linalg, UnitarySpectrumOfDiagonal) {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = std::polar(1.0, 0.5);
  d(1, 1) = std::polar(1.0, -2.0);
  d(2, 2) = 1.0;
  std::vector<Complex> s = st::unitary_spectrum(st::UnitaryMatrix::checked(d));
  ASSERT_EQ(s.size(), 3u);
  for (st::Index i = 0; i < 3; ++i) {
    const auto hit = std::find_if(s.begin(), s.end(), [&](Complex z) { return std::abs(z - d(i, i)) < 1e-12; });
    EXPECT_NE(hit, s.end());
  }
}

TEST(Linalg, AdDisplacementEqualsCommutatorNorm) {
  st::Rng rng(17);
  const st::UnitaryMatrix u = st::haar_unitary(rng, 5);
  const Matrix x = st::ginibre(rng, 5, 5);
  const Matrix direct = u.matrix() * x * u.matrix().adjoint() - x;
  EXPECT_NEAR(st::ad_displacement(u, x), oracle::norm2(direct), 1e-9);
}

TEST(Random, HaarUnitaryIsUnitaryAndSeeded) {
  st::Rng a(99);
  st::Rng b(99);
  const Matrix ua = st::haar_unitary(a, 6).matrix();
  const Matrix ub = st::haar_unitary(b, 6).matrix();
  EXPECT_EQ(ua, ub);
  EXPECT_LT(oracle::unitarity_defect(ua), 1e-12);
  EXPECT_NE(st::derive_seed(1, 0), st::derive_seed(1, 1));
  EXPECT_NE(st::derive_seed(1, 0), st::derive_seed(2, 0));
}

TEST(Random, DensityHasRequestedRankAndTrace) {
  st::Rng rng(5);
  const st::HermitianMatrix rho = st::random_density(rng, 5, 2);
  EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(rho.matrix());
  EXPECT_LT(std::abs(eig.eigenvalues()(2)), 1e-12);
  EXPECT_GT(eig.eigenvalues()(3), 1e-6);
}
