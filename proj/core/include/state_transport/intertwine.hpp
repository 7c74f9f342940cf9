#pragma once

// Back-and-forth intertwining of two vector states along a tower of full
// matrix algebras A_1 in A_2 in ... in M_D. Each round moves one side with a
// transport in the relative commutant of a tower level; the odd and even
// products approximate the two limit automorphisms.

#include <vector>

#include "state_transport/linalg.hpp"
#include "state_transport/matrix_units.hpp"
#include "state_transport/unitary_path.hpp"

namespace state_transport {

/// Level l (1-based) is M_{N_l} tensored with the identity of C^{D / N_l},
/// N_l = b_1 ... b_l.
class AlgebraTower {
 public:
  AlgebraTower(Index ambient_dim, std::vector<Index> branching, std::vector<MatrixUnits> levels)
      : ambient_dim_(ambient_dim), branching_(std::move(branching)), levels_(std::move(levels)) {}

  Index ambient_dim() const noexcept { return ambient_dim_; }
  std::size_t depth() const noexcept { return levels_.size(); }
  const std::vector<Index>& branching() const noexcept { return branching_; }
  const MatrixUnits& level(std::size_t l) const { return levels_.at(l - 1); }
  /// Smallest level containing x (within 1e-10 in norm); 0 for scalars,
  /// depth() + 1 when x lies in no level.
  std::size_t level_of(const Matrix& x) const;
  /// Element i (1-based) of the enumeration of all matrix units, level by
  /// level and row-major inside a level.
  Matrix dense_element(std::size_t i) const;
  std::size_t dense_level(std::size_t i) const;

 private:
  Index ambient_dim_;
  std::vector<Index> branching_;
  std::vector<MatrixUnits> levels_;
};

/// Throws tower-spec when the product of the branchings does not divide
/// ambient_dim or some branching is below 2.
AlgebraTower build_tower(const std::vector<Index>& branching, Index ambient_dim);

struct Schedule {
  double eps = 0.1;
  int rounds = 0;
  bool repair = true;
  /// Per round n = 1..rounds (index n - 1):
  std::vector<double> budgets;        // 2^{-n+1} eps
  std::vector<double> tolerances;     // terminal tolerance of the round transport
  std::vector<std::size_t> levels;    // tower level whose commutant hosts u_n
  /// delta_0 .. delta_rounds; delta_{n-1} is the hypothesis of round n and
  /// delta_n the matching the round must leave behind on G_n.
  std::vector<double> deltas;
  /// G_n is the unit system of level g_levels[n], n = 0..rounds.
  std::vector<std::size_t> g_levels;
};

/// Derives levels and tolerances bottom-up from the commutant gap formula.
/// `f_level` is the tower level of the fixed set F.
Schedule make_schedule(const AlgebraTower& tower, std::size_t f_level, double eps, int rounds,
                       bool repair = true);

struct RoundLog {
  int round = 0;
  std::size_t level = 0;
  double budget = 0.0;
  double delta_in = 0.0;
  double delta_out = 0.0;
  double hypothesis_gap = 0.0;     // statistics gap on G_{n-1} before the round
  double commutation_error = 0.0;  // max over F_{n-1} of ||Ad u_n(x) - x||
  double forward_drift = 0.0;      // max_i ||Ad(P u_n)(x_i) - Ad(P)(x_i)||
  double inverse_drift = 0.0;      // max_i ||Ad((P u_n)^*)(x_i) - Ad(P^*)(x_i)||
  double matching_error = 0.0;     // on G_n after the round
  double terminal_error = 0.0;
  double repair_length = 0.0;
  double path_length = 0.0;
  std::size_t f_size = 0;
};

struct IntertwineResult {
  UnitaryMatrix odd_product;   // u_1 u_3 ...
  UnitaryMatrix even_product;  // u_2 u_4 ...
  Schedule schedule;
  std::vector<RoundLog> rounds;
  std::vector<UnitaryPath> round_paths;
  double odd_error = 0.0;       // max over F of ||Ad(odd)(x) - x||
  double even_error = 0.0;
  double combined_error = 0.0;  // max over F of ||Ad(odd even^*)(x) - x||
  double final_matching = 0.0;  // |w1(Ad(even) x) - w2(Ad(odd) x)| on G_m
};

/// Runs the alternating rounds. Throws round-failure (carrying the measured
/// gap) when a round's statistics hypothesis fails.
IntertwineResult back_and_forth(const AlgebraTower& tower, const StateVector& omega1,
                                const StateVector& omega2, const std::vector<Matrix>& F,
                                const Schedule& schedule);

/// v_t = u_1 u_3 ... u_{2k-1} u_{2k+1, t-k}, reparameterized onto [0, 1].
/// Throws assembly when a round path is missing or does not end at its u_n.
UnitaryPath assemble_path(const IntertwineResult& result);

/// max over x in F and `samples` + 1 uniform times of ||v(t) x v(t)^* - x||.
double sampled_sup_commutation(const UnitaryPath& path, const std::vector<Matrix>& F, int samples);

}  // namespace state_transport
