#pragma once

// JSON-driven entry points behind the command-line tool.
//
// A run config is an object with a "command" field (gram, align, geodesic,
// spectrum, projection, commutant, circle, group, intertwine) plus the inputs
// of that command. Inputs that are omitted are drawn from the seed.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "state_transport/report.hpp"

namespace state_transport {

/// Thrown for malformed configs and unknown commands (exit status 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<std::string>& command_names();

/// Runs one command. Module errors are caught and recorded in the report;
/// UsageError and JSON type errors propagate. `csv`, when given, receives the
/// path sampling of the command.
TransportReport run_json(const Json& config, std::uint64_t seed, CsvTable* csv = nullptr);

struct RunConfig {
  std::string config_path;
  std::string out_path;  // empty: print to `out`
  std::string csv_path;
  std::optional<std::uint64_t> seed;  // overrides the config's "seed"
};

/// Exit status 0 when every bound holds, 1 on a violation or a rejected
/// hypothesis, 2 on usage and IO errors (no report is written then).
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

struct VerifyConfig {
  std::string suite;
  std::uint64_t seed = 0;
  long instances = 100;
  std::string out_path;
};

int verify_command(const VerifyConfig& config, std::ostream& out, std::ostream& err);

}  // namespace state_transport
