#pragma once

// JSON encodings. A complex number is [re, im]; a vector is an array of
// complex numbers; a matrix is an array of rows. Real numbers are accepted
// wherever a complex number is expected.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "state_transport/group_average.hpp"
#include "state_transport/linalg.hpp"

namespace state_transport {

using Json = nlohmann::json;

Json to_json(Complex z);
Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Json to_json(const RealVector& v);

/// Parsers throw invalid-matrix on shape or type errors.
Complex complex_from_json(const Json& j);
Vector vector_from_json(const Json& j);
Matrix matrix_from_json(const Json& j);

/// {"kind": "finite", "table": [[...]], "rep": {"0": M, ...}} or
/// {"kind": "Zd", "generators": [M, ...]}. Other kinds raise unsupported-group.
GroupAction group_action_from_json(const Json& j);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

}  // namespace state_transport
