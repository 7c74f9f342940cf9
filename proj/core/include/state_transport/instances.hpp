#pragma once

// Random admissible inputs for every construction, shared by the property
// suites, the command-line tool, the tests and the benchmarks.

#include <vector>

#include "state_transport/gram_align.hpp"
#include "state_transport/group_average.hpp"
#include "state_transport/intertwine.hpp"
#include "state_transport/matrix_units.hpp"
#include "state_transport/random.hpp"
#include "state_transport/spectral_circle.hpp"

namespace state_transport {

/// n vectors in C^dim of rank min(rank, n, dim), scaled so sum ||x_i||^2 = 1.
VectorFamily random_family(Rng& rng, Index dim, Index n, Index rank);

/// Unit vector near (I_n (x) W) xi with statistics gap at most `max_gap`
/// (W Haar on the multiplicity space).
struct CommutantInstance {
  MatrixUnits units;
  StateVector xi;
  StateVector eta;
};
CommutantInstance commutant_instance(Rng& rng, Index n, Index k, double max_gap);

/// z = I_n (x) z0 with `atoms` eigenvalues of multiplicity 2..4, and
/// eta = (I_n (x) W) xi for W commuting with z0, so every arc statistic agrees.
struct CircleInstance {
  MatrixUnits block;
  SpectralModel model;
  StateVector xi;
  StateVector eta;
};
CircleInstance circle_instance(Rng& rng, Index n, int atoms);

/// Z acting on C^m (+) C^m by U (+) U, xi = (x, 0), eta = (0, W x) with W a
/// function of U, so the orbits are orthogonal and their correlations agree.
struct GroupInstance {
  GroupAction action;
  StateVector xi;
  StateVector eta;
  UnitaryMatrix u;  // the generator on C^m
};
GroupInstance padded_group_instance(Rng& rng, Index m);

/// Tower with the given branching; omega2 = omega1 o Ad(v) for v = I (x) W in
/// the commutant of the first level, plus optional noise of size `noise`.
struct IntertwineInstance {
  AlgebraTower tower;
  StateVector omega1;
  StateVector omega2;
  std::vector<Matrix> F;  // units of the first level
};
IntertwineInstance intertwine_instance(Rng& rng, const std::vector<Index>& branching,
                                       double noise = 0.0);

}  // namespace state_transport
