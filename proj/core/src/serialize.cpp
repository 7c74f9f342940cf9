#include "state_transport/serialize.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "state_transport/errors.hpp"

namespace state_transport {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::kInvalidMatrix, msg); }

}  // namespace

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const RealVector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  bad("expected a number or a [re, im] pair");
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) bad("expected a non-empty array of complex numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from_json(j[i]);
  return v;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) bad("expected an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) bad("matrix rows have different lengths");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Index>(r), static_cast<Index>(c)) = complex_from_json(j[r][c]);
    }
  }
  return m;
}

GroupAction group_action_from_json(const Json& j) {
  const std::string kind = j.value("kind", std::string());
  if (kind == "finite") {
    if (!j.contains("table") || !j.contains("rep")) bad("finite group needs table and rep");
    auto table = j.at("table").get<std::vector<std::vector<int>>>();
    std::vector<UnitaryMatrix> reps;
    for (std::size_t i = 0; i < table.size(); ++i) {
      const std::string key = std::to_string(i);
      if (!j.at("rep").contains(key)) bad("missing representative for element " + key);
      reps.push_back(UnitaryMatrix::checked(matrix_from_json(j.at("rep").at(key))));
    }
    return GroupAction::finite(std::move(table), std::move(reps));
  }
  if (kind == "Zd") {
    if (!j.contains("generators") || !j.at("generators").is_array()) {
      bad("Z^d action needs a generators array");
    }
    std::vector<UnitaryMatrix> gens;
    for (const Json& g : j.at("generators")) gens.push_back(UnitaryMatrix::checked(matrix_from_json(g)));
    return GroupAction::lattice(std::move(gens));
  }
  throw Error(ErrorKind::kUnsupportedGroup, "unsupported group kind '" + kind + "'");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

}  // namespace state_transport
