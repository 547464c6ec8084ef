#include "sympal/json_io.hpp"

#include <fstream>
#include <string>

#include "sympal/errors.hpp"

namespace sympal {

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("matrix: expected a JSON object");
  for (const char* key : {"rows", "cols", "data"}) {
    if (!j.contains(key)) throw ParseError(std::string("matrix: missing field \"") + key + "\"");
  }
  if (!j["rows"].is_number_unsigned() || !j["cols"].is_number_unsigned()) {
    throw ParseError("matrix: \"rows\" and \"cols\" must be nonnegative integers");
  }
  const std::size_t rows = j["rows"].get<std::size_t>();
  const std::size_t cols = j["cols"].get<std::size_t>();
  const auto& data = j["data"];
  if (!data.is_array() || data.size() != rows) {
    throw ParseError("matrix: \"data\" must be an array of " + std::to_string(rows) + " rows");
  }
  std::vector<double> entries;
  entries.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = data[r];
    if (!row.is_array() || row.size() != cols) {
      throw ParseError("matrix: data row " + std::to_string(r) + " must hold " +
                       std::to_string(cols) + " entries");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) {
        throw ParseError("matrix: data[" + std::to_string(r) + "][" + std::to_string(c) +
                         "] is not a number");
      }
      entries.push_back(row[c].get<double>());
    }
  }
  try {
    return Matrix(rows, cols, std::move(entries));
  } catch (const PreconditionError& e) {
    throw ParseError(std::string("matrix: ") + e.what());
  }
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json data = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    data.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

std::vector<double> vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("vector: expected a JSON array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ParseError("vector: entry " + std::to_string(i) + " is not a number");
    }
    out.push_back(j[i].get<double>());
  }
  return out;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

Matrix load_matrix(const std::string& path) {
  const nlohmann::json j = load_json(path);
  try {
    return matrix_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace sympal
