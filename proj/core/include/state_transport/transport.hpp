#pragma once

// Unitary paths that move one vector state to another: minimal geodesics,
// paths commuting with a projection, paths in the relative commutant of a
// matrix block, simultaneous transport on disjoint blocks, and excision.

#include <memory>
#include <vector>

#include "state_transport/gram_align.hpp"
#include "state_transport/linalg.hpp"
#include "state_transport/matrix_units.hpp"
#include "state_transport/unitary_path.hpp"

namespace state_transport {

/// theta = arccos Re<xi, eta>, in [0, pi].
double geodesic_angle(const Vector& xi, const Vector& eta);

/// Constant generator h of the minimal geodesic from xi to eta (exp(ih) xi = eta,
/// ||h|| = theta), supported on span{xi, eta}. When eta is a phase multiple
/// e^{i psi} xi the generator is psi I if `scalar_colinear`, and psi |xi><xi|
/// otherwise. Vectors need equal, nonzero norms.
struct GeodesicGenerator {
  HermitianMatrix h;
  std::shared_ptr<const LowRankSpectrum> spectrum;
  double theta = 0.0;
  bool colinear = false;
};
GeodesicGenerator geodesic_generator(const Vector& xi, const Vector& eta, bool scalar_colinear);

/// Minimal geodesic, realized as `segments` frozen-generator pieces of [0, 1].
UnitaryPath geodesic_pair(const StateVector& xi, const StateVector& eta, int segments = 64);

struct LowerBoundCertificate {
  double theta = 0.0;       // arccos Re<xi, eta>
  double phi = 0.0;         // max |arg| over Spec(u(1)); phi >= theta
  double chain_sum = 0.0;   // eigenvalue chain from e^{i phi} back to 1
  double chord_sum = 0.0;   // sampled chord sum of the path
  double length = 0.0;      // certified length of the path
};
/// Throws precondition when u(0) != I or u(1) xi != eta (1e-8) and
/// certification when phi exceeds the length by more than 1e-6.
LowerBoundCertificate geodesic_lower_bound(const UnitaryPath& path, const StateVector& xi,
                                           const StateVector& eta, int samples = 256);

/// The point of Spec(v) nearest to lambda in Spec(u); |lambda - mu| <= ||u - v||.
Complex spectrum_match(const UnitaryMatrix& u, const UnitaryMatrix& v, Complex lambda);

struct ProjectionTransport {
  UnitaryPath path;
  Complex phase;  // u(1) xi = phase * eta
};
/// Path commuting with the projection e, moving xi to a phase multiple of eta.
ProjectionTransport projection_transport(const HermitianMatrix& e, const StateVector& xi,
                                         const StateVector& eta);

struct CommutantTransport {
  UnitaryPath path;
  double delta = 0.0;           // admissible statistics gap
  double stat_gap = 0.0;        // max |<e_ij xi, xi> - <e_ij eta, eta>|
  double terminal_error = 0.0;  // ||u(1) xi - eta|| before any repair
  double repair_length = 0.0;   // length of the appended geodesic (0 when absent)
  HermitianMatrix corner;       // k x k generator H with u_t = sum_i V_i e^{itH} V_i^*
};

/// Generator data of a commutant transport without building the path:
/// `spectrum` is the nonzero spectrum of g = sum_i V_i H V_i^*, and `end_xi`
/// is exp(i g) xi.
struct CommutantGenerator {
  LowRankSpectrum spectrum;
  HermitianMatrix corner;
  double gap = 0.0;
  Vector end_xi;
};
CommutantGenerator commutant_generator(const MatrixUnits& mu, const Vector& xi, const Vector& eta,
                                       double delta);

/// Statistics gap below which commutant_transport certifies terminal error eps.
double commutant_delta(Index n, Index multiplicity, double eps);

/// Path in the relative commutant of the block: u_t = sum_i e_i1 e^{ith} e_1i
/// (plus the identity off the block). With `repair`, a geodesic from u(1) xi to
/// eta is appended so the terminal state is exact.
/// Throws precondition when xi or eta leaves the block or the gap is not
/// below commutant_delta.
CommutantTransport commutant_transport(const MatrixUnits& mu, const StateVector& xi,
                                       const StateVector& eta, double eps, bool repair = false);
/// Same, with the admissible gap supplied by the caller.
CommutantTransport commutant_transport_with_delta(const MatrixUnits& mu, const Vector& xi,
                                                  const Vector& eta, double eps, double delta,
                                                  bool repair);

struct Excision {
  HermitianMatrix e;
  double error = 0.0;        // max over F of ||e x e - <x xi, xi> e^2||
  bool in_algebra = false;   // e is a minimal projection of the block algebra
};
/// Positive norm-one e with <e xi, xi> = 1 localizing the vector state.
Excision excise(const StateVector& xi, const BlockAlgebra& alg, const std::vector<Matrix>& F,
                double eps);

struct MultiTransport {
  UnitaryPath path;
  std::vector<Index> block_of_pair;
  std::vector<double> terminal_errors;   // ||u(1) xi_i - eta_i||
  std::vector<double> stat_gaps;
  double max_commutator = 0.0;           // max over F and sampled t of ||[u(t), x]||
};
/// Simultaneous transport of pairs living in distinct blocks; the path is the
/// direct sum of per-block commutant transports followed by exact repair.
MultiTransport multi_transport(const std::vector<std::pair<StateVector, StateVector>>& pairs,
                               const BlockAlgebra& alg, const std::vector<Matrix>& F, double eps);

/// max over sampled t of ||[u(t), x]|| for each x, with `samples` + 1 points.
std::vector<double> sampled_commutators(const UnitaryPath& path, const std::vector<Matrix>& xs,
                                        int samples);

}  // namespace state_transport
