#pragma once

// Unitary group actions on C^D, Følner sets, conjugate averaging and the
// reflection path e^{i pi t h} that swaps a vector orbit with a matched one.

#include <vector>

#include "state_transport/gram_align.hpp"
#include "state_transport/linalg.hpp"
#include "state_transport/unitary_path.hpp"

namespace state_transport {

/// Element of Z^d (coordinates) or of a finite group (a single index).
using GroupElement = std::vector<long>;

class GroupAction {
 public:
  enum class Kind { kFinite, kLattice };

  /// table[a][b] is the index of a*b; reps[a] represents element a. Exactly
  /// one row of the table must act as the identity.
  static GroupAction finite(std::vector<std::vector<int>> table, std::vector<UnitaryMatrix> reps);
  /// Z^d acting through commuting unitaries, one per standard generator.
  static GroupAction lattice(std::vector<UnitaryMatrix> generators);

  Kind kind() const noexcept { return kind_; }
  Index dim() const;
  /// d for Z^d, the order for finite groups.
  std::size_t rank_or_order() const;
  bool is_abelian() const;

  GroupElement identity() const;
  GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
  UnitaryMatrix rep(const GroupElement& g) const;
  /// All elements of a finite group.
  std::vector<GroupElement> elements() const;
  /// Unitaries that generate the action (the Z^d generators or all finite reps).
  std::vector<UnitaryMatrix> generating_unitaries() const;
  /// max ||rep(a) rep(b) - rep(ab)|| over the given elements, and ||rep(1) - I||.
  double multiplicativity_residual(const std::vector<GroupElement>& sample) const;

 private:
  GroupAction() = default;
  Kind kind_ = Kind::kLattice;
  std::vector<std::vector<int>> table_;
  std::vector<UnitaryMatrix> reps_;
  int identity_index_ = 0;
  // Z^d: Schur data of each generator so powers cost one product.
  std::vector<Matrix> eigvecs_;
  std::vector<Vector> eigvals_;
};

struct FolnerSet {
  std::vector<GroupElement> elements;
  double defect = 0.0;
};

/// max over g in F of |S symmetric-difference S g| / |S|.
double folner_defect(const GroupAction& action, const std::vector<GroupElement>& set,
                     const std::vector<GroupElement>& F);

/// Finite groups: the whole group. Z^d: the box of side floor(2 r / eps) + 1
/// around the origin, r the largest l1 norm in F, so the defect is below eps.
FolnerSet folner_set(const GroupAction& action, const std::vector<GroupElement>& F, double eps);

/// (1/|S|) sum_{g in S} rep(g)^* h rep(g). Throws precondition when ||h|| > 1.
HermitianMatrix average_conjugates(const HermitianMatrix& h, const FolnerSet& folner,
                                   const GroupAction& action);

/// Projection onto span{x_g - z_g} that annihilates every x_g + z_g. Needs
/// matching Gram matrices; throws flip-inconsistency when some sum vector is
/// not annihilated to 1e-10.
HermitianMatrix flip_projection(const VectorFamily& xs, const VectorFamily& zs);

struct GroupLeg {
  double eps_prime = 0.0;
  double gram_gap = 0.0;
  double delta = 0.0;
  double zeta_error = 0.0;     // ||e^{i pi hbar} xi - zeta||
  double zeta_bound = 0.0;     // eps' (e^pi - 1 + pi e^pi)
  double terminal_error = 0.0; // ||u(1) xi - target||
  double flip_residual = 0.0;
};

struct GroupTransport {
  UnitaryPath path;
  FolnerSet folner;
  bool detour = false;
  std::vector<GroupLeg> legs;
  Vector eta_prime;                 // intermediate vector (detour only)
  double commutator = 0.0;          // sampled max over F of ||[u(t), rep g]||
  double commutator_bound = 0.0;    // pi eps per leg
  double terminal_error = 0.0;
  double terminal_bound = 0.0;      // (eps'(e^pi - 1 + pi e^pi) + 2 eps') per leg
};

/// Moves xi to (approximately) eta along e^{i pi t hbar}, nearly commuting
/// with rep(F). Orbits that are not orthogonal go through an intermediate
/// vector; only abelian actions support that detour (detour-failure otherwise).
GroupTransport group_state_transport(const GroupAction& action, const StateVector& xi,
                                     const StateVector& eta, const std::vector<GroupElement>& F,
                                     double eps);

/// e^pi - 1 + pi e^pi.
double reflection_constant();

}  // namespace state_transport
