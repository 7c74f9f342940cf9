#pragma once

// Measured-versus-bound reports and CSV samplings produced by commands.

#include <chrono>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "state_transport/errors.hpp"
#include "state_transport/serialize.hpp"

namespace state_transport {

struct Quantity {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;  // measured <= bound
};

class TransportReport {
 public:
  TransportReport(std::string command, Json echo);

  /// Records a checked quantity; the report passes iff every check passes.
  void check(const std::string& name, double measured, double bound);
  /// Extra measured data that carries no bound.
  void note(const std::string& name, Json value);
  /// Marks the run as failed because a module rejected its inputs.
  void reject(const Error& error);

  bool pass() const;
  const std::vector<Quantity>& quantities() const noexcept { return quantities_; }
  void set_wall_time(double seconds) { wall_time_ = seconds; }
  /// Wall time is left out when `with_time` is false, so reruns compare equal.
  Json to_json(bool with_time = true) const;

 private:
  std::string command_;
  Json echo_;
  std::vector<Quantity> quantities_;
  Json notes_ = Json::object();
  std::optional<std::pair<std::string, std::string>> rejection_;  // kind, message
  double rejection_measured_ = 0.0;
  double wall_time_ = 0.0;
};

/// Header row then one row per sample, shortest round-trip number formatting.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void add_row(std::vector<double> row);
  void write(std::ostream& os) const;
  std::size_t rows() const noexcept { return rows_.size(); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace state_transport
