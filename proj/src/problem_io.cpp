#include <fstream>
#include <sstream>

#include "msturm/errors.hpp"
#include "msturm/problem.hpp"

namespace msturm {

using nlohmann::json;

inline constexpr const char* kProblemFormat = "msturm-problem/1";

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw SchemaError(field + ": expected a list of rows");
  if (j.empty()) return Matrix(0, 0);
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& row = j[i];
    if (!row.is_array() || row.size() != cols)
      throw SchemaError(field + ": row " + std::to_string(i) + " is not a list of length " + std::to_string(cols));
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number())
        throw SchemaError(field + "[" + std::to_string(i) + "][" + std::to_string(c) + "]: expected a number");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return m;
}

namespace {

Vector vector_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw SchemaError(field + ": expected a list of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw SchemaError(field + "[" + std::to_string(i) + "]: expected a number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

const json& field(const json& doc, const std::string& key, const std::string& where) {
  auto it = doc.find(key);
  if (it == doc.end()) throw SchemaError(where + ": missing field '" + key + "'");
  return *it;
}

json path_to_json(const CoefficientPath& R) {
  json data;
  switch (R.kind()) {
    case PathKind::Constant:
      data = matrix_to_json(R.matrices().front());
      break;
    case PathKind::Polynomial:
      data = json::array();
      for (const auto& c : R.matrices()) data.push_back(matrix_to_json(c));
      break;
    case PathKind::Trigonometric: {
      json terms = json::array();
      for (const auto& term : R.terms())
        terms.push_back({{"omega", term.omega}, {"cos", matrix_to_json(term.cos_coeff)},
                         {"sin", matrix_to_json(term.sin_coeff)}});
      data = {{"constant", matrix_to_json(R.matrices().front())}, {"terms", terms}};
      break;
    }
    case PathKind::SampledGrid: {
      json values = json::array();
      for (const auto& v : R.matrices()) values.push_back(matrix_to_json(v));
      data = {{"t", R.times()}, {"values", values}};
      break;
    }
  }
  return {{"kind", to_string(R.kind())}, {"data", data}};
}

CoefficientPath path_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("R: expected an object {kind, data}");
  const auto kind = field(j, "kind", "R").get<std::string>();
  const json& data = field(j, "data", "R");
  if (kind == "constant") return CoefficientPath::constant(matrix_from_json(data, "R.data"));
  if (kind == "polynomial-in-t") {
    if (!data.is_array()) throw SchemaError("R.data: expected a list of matrices");
    std::vector<Matrix> coeffs;
    for (std::size_t i = 0; i < data.size(); ++i)
      coeffs.push_back(matrix_from_json(data[i], "R.data[" + std::to_string(i) + "]"));
    return CoefficientPath::polynomial(std::move(coeffs));
  }
  if (kind == "trigonometric") {
    const Matrix c = matrix_from_json(field(data, "constant", "R.data"), "R.data.constant");
    std::vector<TrigTerm> terms;
    if (data.contains("terms")) {
      for (std::size_t i = 0; i < data["terms"].size(); ++i) {
        const auto& t = data["terms"][i];
        const std::string where = "R.data.terms[" + std::to_string(i) + "]";
        terms.push_back({field(t, "omega", where).get<double>(), matrix_from_json(field(t, "cos", where), where + ".cos"),
                         matrix_from_json(field(t, "sin", where), where + ".sin")});
      }
    }
    return CoefficientPath::trigonometric(c, std::move(terms));
  }
  if (kind == "sampled-grid") {
    const json& tj = field(data, "t", "R.data");
    const json& vj = field(data, "values", "R.data");
    std::vector<double> times;
    for (const auto& x : tj) times.push_back(x.get<double>());
    std::vector<Matrix> values;
    for (std::size_t i = 0; i < vj.size(); ++i)
      values.push_back(matrix_from_json(vj[i], "R.data.values[" + std::to_string(i) + "]"));
    return CoefficientPath::sampled(std::move(times), std::move(values));
  }
  throw SchemaError("R.kind: unknown kind '" + kind + "'");
}

}  // namespace

json problem_to_json(const MorseSturmProblem& p) {
  json doc;
  doc["format"] = kProblemFormat;
  doc["n"] = p.n();
  doc["g"] = matrix_to_json(p.g.entries());
  doc["P"] = matrix_to_json(p.boundary.P.basis().transpose());
  doc["S"] = matrix_to_json(p.boundary.S);
  doc["R"] = path_to_json(p.R);
  if (p.y_seed) doc["y_seed"] = {{"value", vector_to_json(p.y_seed->value)}, {"velocity", vector_to_json(p.y_seed->velocity)}};
  doc["meta"] = p.meta;
  return doc;
}

MorseSturmProblem problem_from_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("problem document must be an object");
  try {
    const int n = field(doc, "n", "problem").get<int>();
    if (n <= 0) throw SchemaError("n must be positive");
    const Matrix g = matrix_from_json(field(doc, "g", "problem"), "g");
    if (g.rows() != n || g.cols() != n)
      throw SchemaError("g: expected " + std::to_string(n) + "x" + std::to_string(n) + ", got " +
                        std::to_string(g.rows()) + "x" + std::to_string(g.cols()));
    CoefficientPath R = path_from_json(field(doc, "R", "problem"));
    if (R.n() != n)
      throw SchemaError("R: dimension " + std::to_string(R.n()) + " does not match n = " + std::to_string(n));
    const json& pj = field(doc, "P", "problem");
    Matrix rows = matrix_from_json(pj, "P");
    if (rows.rows() > 0 && rows.cols() != n)
      throw SchemaError("P: basis vectors must have length " + std::to_string(n));
    const Matrix basis = rows.rows() == 0 ? Matrix(n, 0) : Matrix(rows.transpose());
    Matrix S = matrix_from_json(field(doc, "S", "problem"), "S");
    if (basis.cols() == 0) S.resize(0, 0);
    if (S.rows() != basis.cols() || S.cols() != basis.cols())
      throw SchemaError("S: expected " + std::to_string(basis.cols()) + "x" + std::to_string(basis.cols()));

    std::optional<WitnessSeed> seed;
    if (auto it = doc.find("y_seed"); it != doc.end() && !it->is_null()) {
      seed = WitnessSeed{vector_from_json(field(*it, "value", "y_seed"), "y_seed.value"),
                         vector_from_json(field(*it, "velocity", "y_seed"), "y_seed.velocity")};
      if (seed->value.size() != n || seed->velocity.size() != n)
        throw SchemaError("y_seed: vectors must have length " + std::to_string(n));
    }
    json meta = doc.contains("meta") ? doc["meta"] : json::object();
    return MorseSturmProblem{MetricForm(g), std::move(R), BoundaryData{Subspace(n, basis), S}, seed, meta};
  } catch (const json::exception& e) {
    throw SchemaError(std::string("problem document: ") + e.what());
  } catch (const DegenerateMetric& e) {
    throw SchemaError(std::string("g: ") + e.what());
  } catch (const InvalidSubspace& e) {
    throw SchemaError(std::string("P: ") + e.what());
  }
}

MorseSturmProblem parse_problem(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line/column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + e.what());
  }
  return problem_from_json(doc);
}

MorseSturmProblem load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_problem(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

void save(const MorseSturmProblem& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write " + path);
  out << problem_to_json(problem).dump(2) << '\n';
}

}  // namespace msturm
