#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sympal/matrix.hpp"

namespace sympal {

// Matrix wire schema: {"rows": R, "cols": C, "data": [[row...], ...]}.
// Parse errors name the offending row/column.
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Matrix& m);

std::vector<double> vector_from_json(const nlohmann::json& j);

Matrix load_matrix(const std::string& path);
nlohmann::json load_json(const std::string& path);

}  // namespace sympal
