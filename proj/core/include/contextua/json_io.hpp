#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "contextua/imm.hpp"
#include "contextua/rational.hpp"
#include "contextua/scenario.hpp"

/// JSON exchange formats. Exact rationals travel as strings ("3/4", "1");
/// readers also accept plain JSON numbers and decimal strings.
namespace contextua::io {

using json = nlohmann::json;

/// Parses JSON text; syntax errors become InvalidInput naming line and
/// column of `source`.
json parse(const std::string& text, const std::string& source = "<input>");
json load_file(const std::string& path);

json to_json(const Rational& r);
/// `field` is a path used in error messages, e.g. "M[3][2]".
Rational rational_from_json(const json& j, const std::string& field);

/// { "observables": [{"id": str, "outcomes": [int]}], "contexts": [[str]] }
json scenario_to_json(const MarginalScenario& s);
MarginalScenario scenario_from_json(const json& j);

/// { "M": [[r]], "V": [r], "T": [[0|1]], "selected": [int] }
json embedding_to_json(const AffineEmbedding& emb);
AffineEmbedding embedding_from_json(const json& j);

/// { "vertices": [[r]] } or a bare array of vertices.
json vertices_to_json(const std::vector<RationalVector>& vs);
std::vector<RationalVector> vertices_from_json(const json& j);

/// { "blocks": [[[r]]] } (row-major) or a bare array of blocks.
json imm_to_json(const ExactBlocks& blocks);
json imm_to_json(const Imm& w);
ExactBlocks imm_from_json(const json& j);

/// A real vector given as an array, or as {"q": [...]}.
Eigen::VectorXd vector_from_json(const json& j, const std::string& field = "q");
json vector_to_json(const Eigen::VectorXd& v);

}  // namespace contextua::io
