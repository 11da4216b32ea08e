#include "contextua/json_io.hpp"

#include <fstream>
#include <sstream>

#include "contextua/errors.hpp"

namespace contextua::io {

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw InvalidInput("field '" + field + "': " + what);
}

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) field_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) field_error(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require_array(const json& j, const std::string& field) {
  if (!j.is_array()) field_error(field, "expected an array");
  return j;
}

RationalVector rational_row(const json& j, const std::string& field) {
  require_array(j, field);
  RationalVector out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(rational_from_json(j[i], at(field, i)));
  return out;
}

RationalMatrix rational_matrix(const json& j, const std::string& field) {
  require_array(j, field);
  std::vector<RationalVector> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    rows.push_back(rational_row(j[i], at(field, i)));
    if (rows.back().size() != rows.front().size()) field_error(at(field, i), "rows have different lengths");
  }
  return RationalMatrix::from_rows(rows);
}

json matrix_json(const RationalMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

json parse(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InvalidInput(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

json to_json(const Rational& r) { return to_string(r); }

Rational rational_from_json(const json& j, const std::string& field) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number()) return exact_from_double(j.get<double>());
  } catch (const InvalidInput& e) {
    field_error(field, e.what());
  }
  field_error(field, "expected a number or a rational string");
}

json scenario_to_json(const MarginalScenario& s) {
  json obs = json::array();
  for (const auto& o : s.observables()) obs.push_back({{"id", o.id}, {"outcomes", o.outcomes}});
  json ctx = json::array();
  for (const auto& c : s.contexts()) ctx.push_back(c.members);
  return {{"observables", obs}, {"contexts", ctx}};
}

MarginalScenario scenario_from_json(const json& j) {
  const auto& obs = require_array(require(j, "observables", ""), "observables");
  std::vector<Observable> observables;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const std::string path = at("observables", i);
    const auto& id = require(obs[i], "id", path);
    if (!id.is_string()) field_error(join(path, "id"), "expected a string");
    const auto& outs = require_array(require(obs[i], "outcomes", path), join(path, "outcomes"));
    Observable o{id.get<std::string>(), {}};
    for (std::size_t k = 0; k < outs.size(); ++k) {
      if (!outs[k].is_number_integer()) field_error(at(join(path, "outcomes"), k), "expected an integer");
      o.outcomes.push_back(outs[k].get<int>());
    }
    observables.push_back(std::move(o));
  }
  const auto& ctx = require_array(require(j, "contexts", ""), "contexts");
  std::vector<std::vector<std::string>> contexts;
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    const auto& c = require_array(ctx[i], at("contexts", i));
    std::vector<std::string> members;
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (!c[k].is_string()) field_error(at(at("contexts", i), k), "expected an observable id");
      members.push_back(c[k].get<std::string>());
    }
    contexts.push_back(std::move(members));
  }
  return MarginalScenario(std::move(observables), contexts);
}

json embedding_to_json(const AffineEmbedding& emb) {
  json v = json::array();
  for (const auto& x : emb.v()) v.push_back(to_json(x));
  json t = json::array();
  for (auto s : emb.selected()) {
    std::vector<int> row(emb.full_dim(), 0);
    row[s] = 1;
    t.push_back(row);
  }
  return {{"M", matrix_json(emb.m())}, {"V", v}, {"T", t}, {"selected", emb.selected()}};
}

AffineEmbedding embedding_from_json(const json& j) {
  RationalMatrix m = rational_matrix(require(j, "M", ""), "M");
  RationalVector v = rational_row(require(j, "V", ""), "V");
  std::vector<std::size_t> selected;
  if (j.contains("selected")) {
    const auto& s = require_array(j["selected"], "selected");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_number_unsigned()) field_error(at("selected", i), "expected a non-negative integer");
      selected.push_back(s[i].get<std::size_t>());
    }
  } else {
    const auto& t = require_array(require(j, "T", ""), "T");
    for (std::size_t r = 0; r < t.size(); ++r) {
      const auto row = rational_row(t[r], at("T", r));
      std::size_t ones = 0, pos = 0;
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (row[c] == 1) {
          ++ones;
          pos = c;
        } else if (row[c] != 0) {
          field_error(at(at("T", r), c), "T must be a 0/1 selection");
        }
      }
      if (ones != 1) field_error(at("T", r), "each row of T needs exactly one 1");
      selected.push_back(pos);
    }
  }
  if (v.size() != m.rows()) field_error("V", "length differs from the rows of M");
  return AffineEmbedding(std::move(m), std::move(v), std::move(selected));
}

json vertices_to_json(const std::vector<RationalVector>& vs) {
  json out = json::array();
  for (const auto& v : vs) {
    json row = json::array();
    for (const auto& x : v) row.push_back(to_json(x));
    out.push_back(std::move(row));
  }
  return {{"vertices", out}};
}

std::vector<RationalVector> vertices_from_json(const json& j) {
  const json& arr = j.is_object() ? require(j, "vertices", "") : j;
  require_array(arr, "vertices");
  std::vector<RationalVector> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(rational_row(arr[i], at("vertices", i)));
  return out;
}

json imm_to_json(const ExactBlocks& blocks) {
  json out = json::array();
  for (const auto& b : blocks) out.push_back(matrix_json(b));
  return {{"blocks", out}};
}

json imm_to_json(const Imm& w) {
  json out = json::array();
  for (const auto& b : w.blocks()) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < b.cols(); ++c) row.push_back(b(r, c));
      rows.push_back(std::move(row));
    }
    out.push_back(std::move(rows));
  }
  return {{"blocks", out}};
}

ExactBlocks imm_from_json(const json& j) {
  const json& arr = j.is_object() ? require(j, "blocks", "") : j;
  require_array(arr, "blocks");
  if (arr.empty()) field_error("blocks", "no blocks given");
  ExactBlocks out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    auto m = rational_matrix(arr[i], at("blocks", i));
    if (m.rows() != m.cols()) field_error(at("blocks", i), "block is not square");
    out.push_back(std::move(m));
  }
  return out;
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& field) {
  const json& arr = j.is_object() ? require(j, field.c_str(), "") : j;
  require_array(arr, field);
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = to_double(rational_from_json(arr[i], at(field, i)));
  return v;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace contextua::io
