#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "state_transport/errors.hpp"
#include "state_transport/group_average.hpp"
#include "state_transport/instances.hpp"
#include "state_transport/random.hpp"

namespace st = state_transport;
using st::GroupElement;
using st::Matrix;
using st::Vector;

namespace {

// |S symmetric-difference S g| / |S| by explicit set arithmetic.
double defect_oracle(const st::GroupAction& action, const std::vector<GroupElement>& s, const GroupElement& g) {
  const std::set<GroupElement> a(s.begin(), s.end());
  std::set<GroupElement> b;
  for (const GroupElement& x : s) b.insert(action.multiply(x, g));
  long diff = 0;
  for (const auto& x : a) diff += b.count(x) ? 0 : 1;
  for (const auto& x : b) diff += a.count(x) ? 0 : 1;
  return static_cast<double>(diff) / static_cast<double>(s.size());
}

Matrix cyclic_shift(st::Index n) {
  Matrix p = Matrix::Zero(n, n);
  for (st::Index i = 0; i < n; ++i) p((i + 1) % n, i) = 1.0;
  return p;
}

// Regular representation of Z_3 tensored with the identity on C^2.
st::GroupAction z3_on_c6() {
  std::vector<std::vector<int>> table(3, std::vector<int>(3));
  std::vector<st::UnitaryMatrix> reps;
  Matrix power = Matrix::Identity(3, 3);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) table[a][b] = (a + b) % 3;
    Matrix rep = Matrix::Zero(6, 6);
    for (st::Index i = 0; i < 3; ++i) {
      for (st::Index j = 0; j < 3; ++j) rep.block(2 * i, 2 * j, 2, 2) = power(i, j) * Matrix::Identity(2, 2);
    }
    reps.push_back(st::UnitaryMatrix::checked(rep));
    power = cyclic_shift(3) * power;
  }
  return st::GroupAction::finite(table, reps);
}

Vector e(st::Index dim, st::Index i) {
  Vector v = Vector::Zero(dim);
  v(i) = 1.0;
  return v;
}

}  // namespace

TEST(GroupAction, FiniteTableAndRepresentation) {
  const st::GroupAction g = z3_on_c6();
  EXPECT_EQ(g.kind(), st::GroupAction::Kind::kFinite);
  EXPECT_EQ(g.rank_or_order(), 3u);
  EXPECT_TRUE(g.is_abelian());
  EXPECT_EQ(g.identity(), GroupElement{0});
  EXPECT_EQ(g.multiply({2}, {2}), GroupElement{1});
  EXPECT_LT(g.multiplicativity_residual(g.elements()), 1e-14);
}

TEST(GroupAction, LatticePowersMatchRepeatedProducts) {
  st::Rng rng(1);
  const st::UnitaryMatrix u = st::haar_unitary(rng, 3);
  const st::GroupAction z = st::GroupAction::lattice({u});
  const Matrix cube = u.matrix() * u.matrix() * u.matrix();
  EXPECT_LT((z.rep({3}).matrix() - cube).norm(), 1e-12);
  EXPECT_LT((z.rep({-1}).matrix() - u.matrix().adjoint()).norm(), 1e-12);
  EXPECT_EQ(z.multiply({4}, {-6}), GroupElement{-2});
}

TEST(GroupAction, ValidationErrors) {
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const st::Error& err) {
      return err.kind();
    }
    return st::ErrorKind::kCertification;
  };
  const st::UnitaryMatrix id = st::UnitaryMatrix::identity(2);
  // Not a Latin square.
  EXPECT_EQ(kind_of([&] { st::GroupAction::finite({{0, 1}, {0, 1}}, {id, id}); }), st::ErrorKind::kUnsupportedGroup);
  // Non-commuting lattice generators.
  Matrix x(2, 2), zm(2, 2);
  x << 0, 1, 1, 0;
  zm << 1, 0, 0, -1;
  EXPECT_EQ(kind_of([&] {
              st::GroupAction::lattice({st::UnitaryMatrix::checked(x), st::UnitaryMatrix::checked(zm)});
            }),
            st::ErrorKind::kUnsupportedGroup);
  // Z_2 table with a representation that is not multiplicative.
  EXPECT_EQ(kind_of([&] { st::GroupAction::finite({{0, 1}, {1, 0}}, {id, st::UnitaryMatrix::checked(Matrix(x * st::Complex(0, 1)))}); }),
            st::ErrorKind::kPrecondition);
  EXPECT_EQ(kind_of([&] { st::GroupAction::lattice({id}).elements(); }), st::ErrorKind::kUnsupportedGroup);
}

TEST(Folner, LatticeBoxDefectIsTwoOverLength) {
  st::Rng rng(2);
  for (st::Index m : {2, 3, 5}) {
    const st::GroupInstance inst = st::padded_group_instance(rng, m);
    for (double eps : {0.1, 0.25, 0.5}) {
      const std::vector<GroupElement> F{{1}, {-1}};
      const st::FolnerSet fs = st::folner_set(inst.action, F, eps);
      const double L = static_cast<double>(fs.elements.size());
      EXPECT_EQ(fs.elements.size(), static_cast<std::size_t>(std::floor(2.0 / eps)) + 1);
      EXPECT_NEAR(fs.defect, 2.0 / L, 1e-15);
      EXPECT_LT(fs.defect, eps);
      for (const auto& g : F) EXPECT_NEAR(defect_oracle(inst.action, fs.elements, g), 2.0 / L, 1e-15);
    }
  }
}

TEST(Folner, FiniteGroupUsesEveryElement) {
  const st::GroupAction g = z3_on_c6();
  const st::FolnerSet fs = st::folner_set(g, {{1}, {2}}, 0.01);
  EXPECT_EQ(fs.elements.size(), 3u);
  EXPECT_EQ(fs.defect, 0.0);
  EXPECT_EQ(defect_oracle(g, fs.elements, {1}), 0.0);
}

TEST(AverageConjugates, ExactInvarianceOverFiniteGroup) {
  st::Rng rng(3);
  const st::GroupAction g = z3_on_c6();
  const st::FolnerSet fs = st::folner_set(g, {{1}}, 0.1);
  const st::HermitianMatrix h = st::random_hermitian(rng, 6, 0.9);
  const st::HermitianMatrix hbar = st::average_conjugates(h, fs, g);
  Matrix expected = Matrix::Zero(6, 6);
  for (const auto& x : g.elements()) {
    const Matrix r = g.rep(x).matrix();
    expected += r.adjoint() * h.matrix() * r / 3.0;
  }
  EXPECT_LT((hbar.matrix() - expected).norm(), 1e-14);
  for (const auto& x : g.elements()) {
    const Matrix r = g.rep(x).matrix();
    EXPECT_LT((r * hbar.matrix() - hbar.matrix() * r).norm(), 1e-13);
  }
  EXPECT_THROW(st::average_conjugates(st::random_hermitian(rng, 6, 1.5), fs, g), st::Error);
}

TEST(AverageConjugates, PropertyCommutatorBoundedByDefect) {
  st::Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const st::GroupInstance inst = st::padded_group_instance(rng, 2 + trial % 3);
    const std::vector<GroupElement> F{{1}, {-1}};
    const st::FolnerSet fs = st::folner_set(inst.action, F, 0.2);
    const st::HermitianMatrix h = st::random_hermitian(rng, inst.action.dim(), 1.0);
    const st::HermitianMatrix hbar = st::average_conjugates(h, fs, inst.action);
    const double hn = oracle::norm2(h.matrix(), 500);
    EXPECT_LE(oracle::norm2(hbar.matrix(), 500), hn + 1e-9);
    for (const auto& gg : F) {
      const Matrix r = inst.action.rep(gg).matrix();
      EXPECT_LE(oracle::norm2(r * hbar.matrix() - hbar.matrix() * r, 500), 2.0 * hn * fs.defect + 1e-9);
    }
  }
}

TEST(FlipProjection, SwapRelations) {
  // x_g = e_g (x) a and z_g = e_g (x) b with a, b orthonormal in C^2.
  Matrix xs(6, 3), zs(6, 3);
  for (st::Index g = 0; g < 3; ++g) {
    xs.col(g) = e(6, 2 * g);
    zs.col(g) = e(6, 2 * g + 1);
  }
  const st::HermitianMatrix p = st::flip_projection(st::VectorFamily(xs), st::VectorFamily(zs));
  EXPECT_LT((p.matrix() * p.matrix() - p.matrix()).norm(), 1e-12);
  for (st::Index g = 0; g < 3; ++g) {
    EXPECT_LT((p.matrix() * (xs.col(g) - zs.col(g)) - (xs.col(g) - zs.col(g))).norm(), 1e-12);
    EXPECT_LT((p.matrix() * (xs.col(g) + zs.col(g))).norm(), 1e-12);
  }
  // e^{i pi E} = I - 2E swaps x_g and z_g.
  const Matrix refl = oracle::expi(p.matrix(), st::kPi);
  EXPECT_LT((refl * xs - zs).norm(), 1e-12);
}

TEST(GroupTransport, OrthogonalOrbitsMoveExactly) {
  const st::GroupAction g = z3_on_c6();
  const st::StateVector xi = st::StateVector::checked(e(6, 0));
  const st::StateVector eta = st::StateVector::checked(e(6, 1));
  const st::GroupTransport tr = st::group_state_transport(g, xi, eta, {{1}, {2}}, 0.1);
  EXPECT_FALSE(tr.detour);
  ASSERT_EQ(tr.legs.size(), 1u);
  EXPECT_LT(tr.terminal_error, 1e-12);
  EXPECT_LT(tr.commutator, 1e-12);
  EXPECT_NEAR(tr.path.length(), st::kPi, 1e-12);
}

TEST(GroupTransport, PropertyBoundsOnPaddedLattice) {
  st::Rng rng(5);
  for (int trial = 0; trial < 12; ++trial) {
    const double eps = (trial % 2) ? 0.2 : 0.1;
    const st::GroupInstance inst = st::padded_group_instance(rng, 2 + trial % 4);
    const std::vector<GroupElement> F{{1}, {-1}};
    const st::GroupTransport tr = st::group_state_transport(inst.action, inst.xi, inst.eta, F, eps);
    EXPECT_LE(tr.terminal_error, tr.terminal_bound) << "trial " << trial;
    EXPECT_LE(tr.commutator, tr.commutator_bound);
    EXPECT_NEAR(tr.commutator_bound, st::kPi * eps * static_cast<double>(tr.legs.size()), 1e-12);
    EXPECT_NEAR((tr.path.end().matrix() * inst.xi.vector() - inst.eta.vector()).norm(), tr.terminal_error, 1e-10);
    for (const st::GroupLeg& leg : tr.legs) {
      EXPECT_NEAR(leg.zeta_bound, leg.eps_prime * st::reflection_constant(), 1e-12);
      EXPECT_LE(leg.zeta_error, leg.zeta_bound);
      EXPECT_LT(leg.flip_residual, 1e-10);
    }
  }
}

TEST(GroupTransport, ReflectionConstant) {
  const double ep = std::exp(st::kPi);
  EXPECT_DOUBLE_EQ(st::reflection_constant(), ep - 1.0 + st::kPi * ep);
}
