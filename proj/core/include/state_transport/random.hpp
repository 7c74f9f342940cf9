#pragma once

// Seeded generators for random test instances. Every draw goes through one
// mt19937_64 stream, so a seed fixes the whole instance.

#include <cstdint>
#include <random>

#include "state_transport/linalg.hpp"

namespace state_transport {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  Complex complex_normal() { return {normal(), normal()}; }
  /// Uniform integer in [lo, hi].
  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(engine_); }
  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Seed of instance `index` derived from a run seed (splitmix64 mixing).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

Matrix ginibre(Rng& rng, Index rows, Index cols);
Vector random_unit_vector(Rng& rng, Index dim);
/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
UnitaryMatrix haar_unitary(Rng& rng, Index dim);
/// (G + G^*)/2 scaled to operator norm `norm`.
HermitianMatrix random_hermitian(Rng& rng, Index dim, double norm = 1.0);
/// G G^* for a dim x rank Ginibre G, scaled to trace one.
HermitianMatrix random_density(Rng& rng, Index dim, Index rank);

}  // namespace state_transport
