#include <gtest/gtest.h>

#include "oracles.hpp"
#include "state_transport/errors.hpp"
#include "state_transport/instances.hpp"
#include "state_transport/intertwine.hpp"
#include "state_transport/random.hpp"

namespace st = state_transport;
using st::Matrix;

namespace {

double ad_error(const Matrix& u, const std::vector<Matrix>& F) {
  double worst = 0.0;
  for (const Matrix& x : F) worst = std::max(worst, oracle::norm2(u * x * u.adjoint() - x, 400));
  return worst;
}

}  // namespace

TEST(Tower, LevelsAreNestedTensorUnits) {
  const st::AlgebraTower t = st::build_tower({2, 3}, 12);
  ASSERT_EQ(t.depth(), 2u);
  EXPECT_EQ(t.level(1).n(), 2);
  EXPECT_EQ(t.level(2).n(), 6);
  for (st::Index i = 0; i < 2; ++i) {
    for (st::Index j = 0; j < 2; ++j) EXPECT_LT((t.level(1).unit(i, j) - oracle::tensor_unit(2, 6, i, j)).norm(), 1e-15);
  }
  EXPECT_EQ(t.level_of(Matrix::Identity(12, 12) * 0.5), 0u);
  EXPECT_EQ(t.level_of(t.level(1).unit(0, 1)), 1u);
  EXPECT_EQ(t.level_of(t.level(2).unit(4, 1)), 2u);
  st::Rng rng(1);
  EXPECT_EQ(t.level_of(st::ginibre(rng, 12, 12)), 3u);
}

TEST(Tower, DenseEnumerationRunsLevelByLevel) {
  const st::AlgebraTower t = st::build_tower({2, 2}, 8);
  EXPECT_EQ(t.dense_element(1), t.level(1).unit(0, 0));
  EXPECT_EQ(t.dense_element(3), t.level(1).unit(1, 0));
  EXPECT_EQ(t.dense_level(4), 1u);
  EXPECT_EQ(t.dense_level(5), 2u);
  EXPECT_EQ(t.dense_element(5 + 7), t.level(2).unit(1, 3));
  EXPECT_THROW(t.dense_element(4 + 16 + 1), st::Error);
}

TEST(Tower, RejectsBadSpecs) {
  for (auto [branching, dim] : std::vector<std::pair<std::vector<st::Index>, st::Index>>{
           {{2, 3}, 10}, {{1, 2}, 4}, {{}, 4}}) {
    try {
      st::build_tower(branching, dim);
      FAIL();
    } catch (const st::Error& e) {
      EXPECT_EQ(e.kind(), st::ErrorKind::kTowerSpec);
    }
  }
}

TEST(Schedule, BudgetsHalveEachRound) {
  const st::AlgebraTower t = st::build_tower({2, 2, 2}, 8);
  const st::Schedule s = st::make_schedule(t, 1, 0.1, 5);
  ASSERT_EQ(s.budgets.size(), 5u);
  ASSERT_EQ(s.levels.size(), 5u);
  ASSERT_EQ(s.deltas.size(), 6u);
  ASSERT_EQ(s.g_levels.size(), 6u);
  for (int n = 1; n <= 5; ++n) EXPECT_DOUBLE_EQ(s.budgets[n - 1], std::ldexp(0.1, -n + 1));
  for (double d : s.deltas) EXPECT_GT(d, 0.0);
  EXPECT_THROW(st::make_schedule(t, 1, -0.1, 3), st::Error);
}

TEST(BackAndForth, PropertyProductsNearlyFixF) {
  st::Rng rng(2);
  const std::vector<std::vector<st::Index>> towers{{2, 2, 2}, {3, 3}, {2, 3, 2}};
  const double eps = 0.1;
  for (int trial = 0; trial < 6; ++trial) {
    const st::IntertwineInstance inst = st::intertwine_instance(rng, towers[trial % 3]);
    const int rounds = 4 + trial % 2;
    const st::Schedule s = st::make_schedule(inst.tower, 1, eps, rounds);
    const st::IntertwineResult r = st::back_and_forth(inst.tower, inst.omega1, inst.omega2, inst.F, s);
    ASSERT_EQ(r.rounds.size(), static_cast<std::size_t>(rounds));
    for (const st::RoundLog& log : r.rounds) {
      EXPECT_LE(log.commutation_error, log.budget) << "round " << log.round;
      EXPECT_LE(log.matching_error, log.delta_out);
    }
    EXPECT_NEAR(ad_error(r.odd_product.matrix(), inst.F), r.odd_error, 1e-8);
    EXPECT_LE(r.odd_error, 4 * eps / 3);
    EXPECT_LE(r.even_error, 2 * eps / 3);
    const Matrix combined = r.odd_product.matrix() * r.even_product.matrix().adjoint();
    EXPECT_LE(ad_error(combined, inst.F), 2 * eps + 1e-9);

    const st::UnitaryPath path = st::assemble_path(r);
    EXPECT_DOUBLE_EQ(path.t_begin(), 0.0);
    EXPECT_DOUBLE_EQ(path.t_end(), 1.0);
    EXPECT_LT((path.end().matrix() - r.odd_product.matrix()).norm(), 1e-9);
    EXPECT_LE(st::sampled_sup_commutation(path, inst.F, 32), 4 * eps / 3 + 1e-6);
  }
}

TEST(BackAndForth, ZeroRoundsIsTheIdentity) {
  st::Rng rng(3);
  const st::IntertwineInstance inst = st::intertwine_instance(rng, {2, 2});
  const st::Schedule s = st::make_schedule(inst.tower, 1, 0.1, 0);
  const st::IntertwineResult r = st::back_and_forth(inst.tower, inst.omega1, inst.omega2, inst.F, s);
  EXPECT_TRUE(r.rounds.empty());
  EXPECT_LT((r.odd_product.matrix() - Matrix::Identity(4, 4)).norm(), 1e-15);
  EXPECT_EQ(r.odd_error, 0.0);
}

TEST(AssemblePath, NeedsOnePathPerRound) {
  st::Rng rng(4);
  const st::IntertwineInstance inst = st::intertwine_instance(rng, {2, 2});
  const st::Schedule s = st::make_schedule(inst.tower, 1, 0.1, 3);
  st::IntertwineResult r = st::back_and_forth(inst.tower, inst.omega1, inst.omega2, inst.F, s);
  r.round_paths.pop_back();
  try {
    st::assemble_path(r);
    FAIL();
  } catch (const st::Error& e) {
    EXPECT_EQ(e.kind(), st::ErrorKind::kAssembly);
  }
}
