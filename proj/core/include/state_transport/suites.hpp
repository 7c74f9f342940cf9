#pragma once

// Randomized property suites. Instance i of a run with seed s draws from
// Rng(derive_seed(s, i)); instances may run on several threads but results are
// combined in index order, so a summary depends only on (suite, seed, count).

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "state_transport/serialize.hpp"

namespace state_transport {

struct PropertyTally {
  std::string name;
  long passed = 0;
  long failed = 0;
  double max_measured = -1e300;
  /// max(measured - bound) over instances; <= 0 when every instance passed.
  double max_excess = -1e300;
};

struct SuiteSummary {
  std::string suite;
  std::uint64_t seed = 0;
  long instances = 0;
  std::vector<PropertyTally> properties;
  /// Instances that threw, with the first message seen.
  long errors = 0;
  std::string first_error;

  long violations() const;
  const PropertyTally* find(const std::string& name) const;
  Json to_json() const;
};

/// gram, align, geodesic, projection, spectrum, commutant, circle, group,
/// intertwine.
const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite name.
SuiteSummary verify_suite(const std::string& suite, std::uint64_t seed, long instances);

/// Worker count: STATE_TRANSPORT_THREADS when set to a positive integer,
/// otherwise the hardware concurrency.
unsigned worker_count();

/// Calls body(i) for i in [0, count) on up to worker_count() threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace state_transport
