#include "ddlti/serialize.hpp"

#include <json.hpp>

#include "ddlti/error.hpp"

namespace ddlti {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text, nullptr, true, true);
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidInput, std::string("malformed document: ") + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorCode::InvalidInput, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::InvalidInput, std::string("field '") + key + "' has the wrong type");
  }
}

json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vec_from(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

json mat_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) rows.push_back(vec_json(M.row(i).transpose()));
  return rows;
}

Matrix mat_from(const std::vector<std::vector<double>>& rows, const char* key) {
  if (rows.empty()) return Matrix(0, 0);
  Matrix M(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) fail(ErrorCode::InvalidInput, std::string("ragged matrix in '") + key + "'");
    for (std::size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
  }
  return M;
}

json rep_json(const Representation& rep) {
  json j;
  j["N"] = rep.N;
  j["m"] = rep.m;
  j["p"] = rep.p;
  json rows = json::array();
  for (const CoefficientRow& r : rep.rows) {
    json b = json::array();
    for (int k = 0; k <= rep.N; ++k) b.push_back(vec_json(r.b.col(k)));
    rows.push_back({{"output", r.output}, {"a", vec_json(r.a)}, {"b", b}});
  }
  j["rows"] = rows;
  if (!rep.ranks.empty()) j["ranks"] = rep.ranks;
  return j;
}

Representation rep_from(const json& j) {
  Representation rep;
  rep.N = field<int>(j, "N");
  rep.m = field<int>(j, "m");
  rep.p = field<int>(j, "p");
  for (const json& r : field<json>(j, "rows")) {
    CoefficientRow row;
    row.output = field<int>(r, "output");
    row.a = vec_from(field<std::vector<double>>(r, "a"));
    const auto b = field<std::vector<std::vector<double>>>(r, "b");
    if (static_cast<int>(b.size()) != rep.N + 1) fail(ErrorCode::InvalidInput, "field 'b' must hold N+1 vectors");
    row.b.resize(rep.m, rep.N + 1);
    for (int k = 0; k <= rep.N; ++k) {
      if (static_cast<int>(b[k].size()) != rep.m) fail(ErrorCode::InvalidInput, "field 'b' entries must have m values");
      row.b.col(k) = vec_from(b[k]);
    }
    rep.rows.push_back(std::move(row));
  }
  if (j.contains("ranks")) {
    rep.ranks = field<std::vector<int>>(j, "ranks");
    if (static_cast<int>(rep.ranks.size()) != rep.p) fail(ErrorCode::InvalidInput, "field 'ranks' must hold p values");
  }
  rep.validate();
  return rep;
}

}  // namespace

std::string to_json(const Representation& rep) { return rep_json(rep).dump(2) + "\n"; }

Representation representation_from_json(const std::string& text) { return rep_from(parse(text)); }

std::string to_json(const ControllerDocument& doc) {
  json j = rep_json(doc.rep);
  j["Q"] = mat_json(doc.weights.Q);
  j["R"] = mat_json(doc.weights.R);
  j["K"] = mat_json(doc.K);
  return j.dump(2) + "\n";
}

ControllerDocument controller_from_json(const std::string& text) {
  const json j = parse(text);
  ControllerDocument doc;
  doc.rep = rep_from(j);
  doc.weights.Q = mat_from(field<std::vector<std::vector<double>>>(j, "Q"), "Q");
  doc.weights.R = mat_from(field<std::vector<std::vector<double>>>(j, "R"), "R");
  doc.K = mat_from(field<std::vector<std::vector<double>>>(j, "K"), "K");
  doc.weights.validate();
  const int states = doc.rep.p * doc.rep.N * (doc.rep.m + 1);
  require(doc.K.rows() == doc.rep.m && doc.K.cols() == states, ErrorCode::InvalidInput, "field 'K' has the wrong shape");
  return doc;
}

std::string to_json(const InverseRepresentation& ir) {
  json j;
  j["N"] = ir.N;
  j["L"] = ir.L;
  j["gamma"] = vec_json(ir.gamma);
  j["delta"] = vec_json(ir.delta);
  return j.dump(2) + "\n";
}

InverseRepresentation inverse_from_json(const std::string& text) {
  const json j = parse(text);
  InverseRepresentation ir;
  ir.N = field<int>(j, "N");
  ir.L = field<int>(j, "L");
  ir.gamma = vec_from(field<std::vector<double>>(j, "gamma"));
  ir.delta = vec_from(field<std::vector<double>>(j, "delta"));
  require(ir.N >= 1 && ir.L >= 0 && ir.gamma.size() == ir.N && ir.delta.size() == ir.N + ir.L + 1,
          ErrorCode::InvalidInput, "inverse representation has inconsistent lengths");
  return ir;
}

}  // namespace ddlti
