#include "state_transport/report.hpp"

#include <algorithm>

namespace state_transport {

TransportReport::TransportReport(std::string command, Json echo)
    : command_(std::move(command)), echo_(std::move(echo)) {}

void TransportReport::check(const std::string& name, double measured, double bound) {
  quantities_.push_back({name, measured, bound, measured <= bound});
}

void TransportReport::note(const std::string& name, Json value) { notes_[name] = std::move(value); }

void TransportReport::reject(const Error& error) {
  rejection_ = std::make_pair(std::string(to_string(error.kind())), std::string(error.what()));
  rejection_measured_ = error.measured();
}

bool TransportReport::pass() const {
  if (rejection_) return false;
  return std::all_of(quantities_.begin(), quantities_.end(), [](const Quantity& q) { return q.pass; });
}

Json TransportReport::to_json(bool with_time) const {
  Json out;
  out["command"] = command_;
  out["config"] = echo_;
  Json qs = Json::array();
  for (const Quantity& q : quantities_) {
    qs.push_back({{"name", q.name}, {"measured", q.measured}, {"bound", q.bound}, {"pass", q.pass}});
  }
  out["quantities"] = std::move(qs);
  out["data"] = notes_;
  if (rejection_) {
    out["violated_hypothesis"] = {{"kind", rejection_->first},
                                  {"message", rejection_->second},
                                  {"measured", rejection_measured_}};
  }
  out["pass"] = pass();
  if (with_time) out["wall_time_s"] = wall_time_;
  return out;
}

void CsvTable::add_row(std::vector<double> row) { rows_.push_back(std::move(row)); }

void CsvTable::write(std::ostream& os) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
}

}  // namespace state_transport
