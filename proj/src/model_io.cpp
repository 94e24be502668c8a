#include "roc/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace roc {

namespace {

using nlohmann::json;

Matrix parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty())
    throw ParseError("model: field '" + field + "' must be a nonempty array");
  const bool nested = j.front().is_array();
  const Index rows = static_cast<Index>(j.size());
  const Index cols =
      nested ? static_cast<Index>(j.front().size()) : 1;
  Matrix M(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (nested) {
      if (!row.is_array() || static_cast<Index>(row.size()) != cols)
        throw ParseError("model: ragged rows in field '" + field + "' (row " +
                         std::to_string(r) + ")");
      for (Index c = 0; c < cols; ++c) {
        if (!row[c].is_number())
          throw ParseError("model: non-numeric entry in field '" + field +
                           "' at (" + std::to_string(r) + ", " +
                           std::to_string(c) + ")");
        M(r, c) = row[c].get<double>();
      }
    } else {
      if (!row.is_number())
        throw ParseError("model: non-numeric entry in field '" + field +
                         "' at row " + std::to_string(r));
      M(r, 0) = row.get<double>();
    }
  }
  return M;
}

json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

PlantModel from_json(const json& j) {
  if (!j.is_object()) throw ParseError("model: top level must be an object");
  for (const std::string field : {"A", "B_u", "B_w"})
    if (!j.contains(field))
      throw ParseError("model: missing required field '" + field + "'");

  Matrix A = parse_matrix(j.at("A"), "A");
  Matrix B_u = parse_matrix(j.at("B_u"), "B_u");
  Matrix B_w = parse_matrix(j.at("B_w"), "B_w");
  const Index n = A.rows();
  // Q = I and R = I unless the file says otherwise.
  Matrix Q = j.contains("Q") ? parse_matrix(j.at("Q"), "Q")
                             : Matrix::Identity(n, n);
  Matrix R = j.contains("R") ? parse_matrix(j.at("R"), "R")
                             : Matrix::Identity(B_u.cols(), B_u.cols());
  std::string name = j.value("name", "unnamed");
  return make_plant(std::move(name), std::move(A), std::move(B_u),
                    std::move(B_w), std::move(Q), std::move(R));
}

}  // namespace

PlantModel parse_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model: invalid JSON: ") + e.what());
  }
  return from_json(j);
}

PlantModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("model: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string model_to_json(const PlantModel& model) {
  json j;
  j["name"] = model.name;
  j["A"] = matrix_to_json(model.A);
  j["B_u"] = matrix_to_json(model.B_u);
  j["B_w"] = matrix_to_json(model.B_w);
  j["Q"] = matrix_to_json(model.Q);
  j["R"] = matrix_to_json(model.R);
  j["metadata"] = {{"n", model.n()}, {"m", model.m()}, {"p", model.p()}};
  return j.dump(2);
}

void save_model(const PlantModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("model: cannot write '" + path + "'");
  out << model_to_json(model) << "\n";
}

}  // namespace roc
