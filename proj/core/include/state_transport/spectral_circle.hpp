#pragma once

// Partitions of the circle adapted to a unitary with finite spectrum, and the
// arc-wise transport built on them. Angles are normalized so the circle has
// length 1: an eigenvalue e^{2 pi i a} sits at a in [0, 1).

#include <functional>
#include <vector>

#include "state_transport/linalg.hpp"
#include "state_transport/matrix_units.hpp"
#include "state_transport/unitary_path.hpp"

namespace state_transport {

class SpectralModel {
 public:
  /// Clusters eigenvalues whose normalized angles differ by at most `cluster_tol`.
  static SpectralModel from_unitary(const UnitaryMatrix& z, double cluster_tol = 1e-9);
  /// z = sum_j e^{2 pi i angle_j} B_j B_j^*; the B_j are orthonormal bases of
  /// mutually orthogonal eigenspaces spanning C^D.
  static SpectralModel from_atoms(std::vector<double> angles, std::vector<Matrix> bases);

  const UnitaryMatrix& z() const noexcept { return z_; }
  Index dim() const { return z_.dim(); }
  /// Distinct atoms, sorted ascending in [0, 1).
  const std::vector<double>& angles() const noexcept { return angles_; }
  const std::vector<Matrix>& bases() const noexcept { return bases_; }
  Matrix projection(std::size_t atom) const { return bases_[atom] * bases_[atom].adjoint(); }
  /// ||E({a_j}) v||^2 for every atom.
  std::vector<double> masses(const Vector& v) const;
  /// Projection onto the atoms inside the half-open arc (start, start + length].
  Matrix arc_projection(double start, double length) const;

 private:
  SpectralModel(UnitaryMatrix z, std::vector<double> angles, std::vector<Matrix> bases)
      : z_(std::move(z)), angles_(std::move(angles)), bases_(std::move(bases)) {}
  UnitaryMatrix z_;
  std::vector<double> angles_;
  std::vector<Matrix> bases_;
};

/// Cut points t_1 < ... < t_m (cyclic, reported in [0, 1)); arc i is
/// (t_{i-1}, t_i] with t_0 = t_m.
struct CirclePartition {
  std::vector<double> points;
  double eps = 0.0;
  double eps_prime = 0.0;
  double gamma = 0.0;                 // eps * eps_prime / 4
  std::vector<double> gaps;           // cyclic distances t_i - t_{i-1}
  std::vector<double> xi_arc_mass;    // ||E(t_{i-1}, t_i] xi||^2, one per point
  std::vector<double> eta_arc_mass;
  std::vector<double> xi_margin_mass; // ||E(t_i - gamma/2, t_i + gamma/2] xi||^2
  std::vector<double> eta_margin_mass;
  /// Moments <U^k xi, xi> for |k| <= moment_order determine every mass exactly.
  int moment_order = 0;
  double moment_gap = 0.0;
  long search_nodes = 0;
};

/// Throws infeasible-partition when no cut sequence meets the gap, margin and
/// arc-mass conditions within the search budget.
CirclePartition circle_partition(const SpectralModel& model, const Vector& xi, const Vector& eta,
                                 double eps, double eps_prime);

/// Same search with an extra acceptance test on each closed arc (start, length).
using ArcPredicate = std::function<bool(double start, double length)>;
CirclePartition circle_partition_with(const SpectralModel& model, const Vector& xi,
                                      const Vector& eta, double eps, double eps_prime,
                                      const ArcPredicate& accept_arc);

/// Continuous window: 0 outside the arc, 1 on [start + gamma/2, end - gamma/2],
/// linear in between. The whole circle gives the constant 1.
class WindowFunction {
 public:
  WindowFunction(double start, double length, double gamma);
  double operator()(double angle) const;
  double plateau_length() const;
  /// f(z) by spectral calculus on the model.
  Matrix apply(const SpectralModel& model) const;

 private:
  double start_;
  double length_;
  double gamma_;
};

/// Throws degenerate-window when the arc is shorter than gamma.
WindowFunction window_function(double start, double length, double gamma);

struct ArcReport {
  double start = 0.0;
  double length = 0.0;
  double xi_mass = 0.0;
  double eta_mass = 0.0;
  bool skipped = false;
  double stat_gap = 0.0;                // normalized matrix-unit gap inside the arc
  double terminal_contribution = 0.0;   // ||P_i (u(1) xi - eta)||
};

struct ArcTransport {
  UnitaryPath path;
  CirclePartition partition;
  std::vector<ArcReport> arcs;
  double eps_prime = 0.0;
  double delta_prime = 0.0;
  double z_commutator = 0.0;   // sampled max ||[u(t), z]||
  double f_commutator = 0.0;   // sampled max over F of ||[u(t), x]||
  double terminal_error = 0.0; // ||u(1) xi - eta||
};

/// Arc-wise transport for A = block tensored with the spectral factor of z.
/// The block must be unital in C^D and commute with z. Throws precondition
/// when some arc's matrix-unit statistics differ by 2 eps' or more for every
/// admissible partition.
ArcTransport arc_transport(const MatrixUnits& block, const SpectralModel& model,
                           const StateVector& xi, const StateVector& eta,
                           const std::vector<Matrix>& F, double eps);

}  // namespace state_transport
