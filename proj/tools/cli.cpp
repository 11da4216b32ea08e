#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "contextua/errors.hpp"
#include "contextua/imm.hpp"
#include "contextua/json_io.hpp"
#include "contextua/kcbs_data.hpp"
#include "contextua/polytope.hpp"
#include "contextua/quantifiers.hpp"
#include "contextua/quantum_kcbs.hpp"
#include "contextua/scenario.hpp"

namespace contextua::cli {

namespace {

using io::json;

struct Options {
  std::string scenario = "kcbs";
  std::string out;
  std::string format;
  std::string policy = "leading";
  std::size_t starts = 64;
  std::optional<std::uint64_t> seed;
  double tol = 1e-9;
  std::size_t threads = 1;

  std::optional<double> lambda, a;
  std::string q;
  std::string grid = "20x20";
  std::string which = "both";
  std::string norm = "ndmax";
  std::string polytope = "nc";
  std::size_t from = 0, to = 0;
  std::string file;
};

struct Loaded {
  MarginalScenario scenario;
  AffineEmbedding embedding;
  bool builtin = false;
};

/// Thrown when a computation finished but produced no valid answer.
struct Failed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

IndexPolicy policy_of(const std::string& name) {
  if (name == "leading") return IndexPolicy::leading();
  if (name == "trailing") return IndexPolicy::trailing();
  throw InvalidInput("unknown index policy '" + name + "'");
}

Loaded load(const Options& o) {
  if (o.scenario == "kcbs") return {kcbs::scenario(), kcbs::embedding(), true};
  auto s = io::scenario_from_json(io::load_file(o.scenario));
  auto emb = derive_embedding(s, policy_of(o.policy));
  return {std::move(s), std::move(emb), false};
}

void require_builtin(const Loaded& l, const char* what) {
  if (!l.builtin) throw InvalidInput(std::string(what) + " is only available for the built-in kcbs scenario");
}

std::uint64_t seed_of(const Options& o) {
  if (o.seed) return *o.seed;
  if (const char* env = std::getenv("CONTEXTUA_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used, 0);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidInput(std::string("CONTEXTUA_SEED is not an integer: '") + env + "'");
  }
  return IcConfig{}.seed;
}

Eigen::VectorXd parse_q(const std::string& text, std::size_t dim) {
  if (text.empty()) throw InvalidInput("--q is required");
  Eigen::VectorXd q;
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    q = io::vector_from_json(io::parse(text, "--q"));
  } else if (std::filesystem::exists(text)) {
    q = io::vector_from_json(io::load_file(text));
  } else {
    std::vector<double> xs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) xs.push_back(to_double(parse_rational(item)));
    q = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  }
  if (static_cast<std::size_t>(q.size()) != dim)
    throw InvalidInput("q has " + std::to_string(q.size()) + " entries; the scenario needs " + std::to_string(dim));
  return q;
}

IndepProbVector target(const Options& o, const Loaded& l) {
  const bool family = o.lambda || o.a;
  if (family && !o.q.empty()) throw InvalidInput("give either --lambda/--a or --q, not both");
  if (family) {
    require_builtin(l, "--lambda/--a");
    if (!o.lambda || !o.a) throw InvalidInput("--lambda and --a go together");
    return quantum::probabilities({*o.lambda, *o.a});
  }
  return {parse_q(o.q, l.embedding.indep_dim())};
}

json matrix(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_of(const Options& o, const char* fallback, bool csv_ok) {
  const std::string f = o.format.empty() ? fallback : o.format;
  if (f != "json" && f != "csv") throw InvalidInput("unknown format '" + f + "'");
  if (f == "csv" && !csv_ok) throw InvalidInput("this command only writes json");
  return f;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string cmd_derive(const Options& o) {
  format_of(o, "json", false);
  const auto l = load(o);
  const auto derived = derive_embedding(l.scenario, policy_of(o.policy));
  json j = io::embedding_to_json(derived);
  j["full_dim"] = derived.full_dim();
  j["indep_dim"] = derived.indep_dim();
  if (l.builtin && o.policy == "leading") {
    const bool same = derived == kcbs::embedding();
    j["self_test"] = same ? "pass" : "fail";
    if (!same) throw Failed("derived embedding differs from the built-in kcbs matrices\n" + dump(j));
  }
  return dump(j);
}

std::vector<RationalVector> polytope_vertices(const Options& o, const Loaded& l) {
  if (o.polytope == "nd") {
    require_builtin(l, "the non-disturbance vertex list");
    return kcbs::nd_vertices();
  }
  if (o.polytope != "nc") throw InvalidInput("unknown polytope '" + o.polytope + "'");
  return l.builtin ? kcbs::nc_vertices() : deterministic_vertices(l.scenario, l.embedding).distinct;
}

std::string cmd_vertices(const Options& o) {
  const auto fmt = format_of(o, "json", true);
  const auto l = load(o);
  const auto vs = polytope_vertices(o, l);
  if (fmt == "json") {
    json j = io::vertices_to_json(vs);
    j["count"] = vs.size();
    return dump(j);
  }
  std::string s;
  for (const auto& v : vs) {
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_string(v[i]);
    s += "\n";
  }
  return s;
}

std::string cmd_membership(const Options& o) {
  format_of(o, "json", false);
  const auto l = load(o);
  const auto q = target(o, l);
  const auto vs = polytope_vertices(o, l);
  const auto r = member(VertexPolytope(vs), q.values, o.tol);
  json j{{"polytope", o.polytope},
         {"inside", r.inside},
         {"residual", r.residual},
         {"nondisturbing", nondisturbance_contains(l.embedding, q.values, o.tol)}};
  if (r.inside) {
    j["weights"] = io::vector_to_json(r.weights);
  } else {
    j["separator_normal"] = io::vector_to_json(r.separator_normal);
    j["separator_offset"] = r.separator_offset;
  }
  return dump(j);
}

std::string cmd_facets(const Options& o) {
  format_of(o, "json", false);
  const auto l = load(o);
  require_builtin(l, "facet data");
  const auto q = target(o, l);
  const auto fs = kcbs_nc_polytope().second;
  const auto r = facet_check(fs, q.values, o.tol);
  return dump({{"location", to_string(r.location)},
               {"most_violated", r.most_violated},
               {"max_slack", r.max_slack},
               {"slacks", io::vector_to_json(r.slacks)},
               {"trivial", fs.trivial}});
}

IcConfig ic_config(const Options& o) {
  IcConfig cfg;
  cfg.starts = o.starts;
  cfg.seed = seed_of(o);
  cfg.membership_tol = o.tol;
  cfg.threads = o.threads;
  return cfg;
}

std::string cmd_ic(const Options& o) {
  format_of(o, "json", false);
  const auto l = load(o);
  const auto q = target(o, l);
  const auto problem = l.builtin ? IcProblem::kcbs() : IcProblem::from_scenario(l.scenario, l.embedding);
  const auto r = invasiveness_cost(problem, q, ic_config(o));
  json starts = json::array();
  for (const auto& s : r.starts)
    starts.push_back({{"seed", s.seed},
                      {"value", s.value},
                      {"residual", s.residual},
                      {"outer_iterations", s.outer_iterations},
                      {"accepted", s.accepted}});
  json j{{"status", to_string(r.status)},
         {"value", r.value},
         {"residual", r.residual},
         {"q", io::vector_to_json(q.values)},
         {"starts", starts}};
  if (l.builtin) j["kcbs_value"] = quantum::kcbs_value(q);
  if (r.upper_bound) j["upper_bound"] = *r.upper_bound;
  if (r.status == IcStatus::Failed) throw Failed("no start produced a certified witness\n" + dump(j));
  j["witness"] = io::imm_to_json(r.witness)["blocks"];
  j["z"] = matrix(r.reduced.z);
  j["v"] = io::vector_to_json(r.reduced.v);
  j["classical_point"] = io::vector_to_json(r.classical_point);
  j["weights"] = io::vector_to_json(r.weights);
  return dump(j);
}

CfNorm norm_of(const std::string& n) {
  if (n == "ndmax") return CfNorm::NdMax;
  if (n == "one") return CfNorm::OneNorm;
  throw InvalidInput("unknown norm '" + n + "' (ndmax or one)");
}

std::string cmd_cf(const Options& o) {
  format_of(o, "json", false);
  const auto l = load(o);
  const auto q = target(o, l);
  if (!l.builtin) {
    const auto nc = deterministic_vertices(l.scenario, l.embedding).distinct;
    const auto r = contextual_fraction_lp(l.embedding, nc, q, o.tol);
    return dump({{"value", r.value}, {"lp_weights", io::vector_to_json(r.weights)}});
  }
  const auto r = contextual_fraction(q, norm_of(o.norm), o.tol);
  return dump({{"value", r.value},
               {"formula_value", r.formula_value},
               {"norm", to_string(norm_of(o.norm))},
               {"max_facet_index", r.max_facet_index},
               {"kcbs_value", quantum::kcbs_value(q)},
               {"lp_weights", io::vector_to_json(r.lp_weights)}});
}

std::string cmd_sweep(const Options& o) {
  const auto fmt = format_of(o, "csv", true);
  const auto l = load(o);
  require_builtin(l, "sweep");
  std::smatch m;
  static const std::regex grid_re(R"((\d+)x(\d+))");
  if (!std::regex_match(o.grid, m, grid_re)) throw InvalidInput("--grid expects NxM, got '" + o.grid + "'");
  SweepConfig cfg;
  cfg.lambda_steps = std::stoul(m[1]);
  cfg.a_steps = std::stoul(m[2]);
  if (cfg.lambda_steps < 2 || cfg.a_steps < 2) throw InvalidInput("--grid needs at least 2 points per axis");
  if (o.which != "ic" && o.which != "cf" && o.which != "both") throw InvalidInput("--which is ic, cf or both");
  cfg.ic = o.which != "cf";
  cfg.cf = o.which != "ic";
  cfg.norm = norm_of(o.norm);
  cfg.ic_config = ic_config(o);
  cfg.ic_config.threads = 1;
  cfg.threads = o.threads;
  const auto rows = sweep(cfg);
  if (fmt == "csv") return sweep_csv(rows);
  json out = json::array();
  for (const auto& r : rows) {
    json row{{"lambda", r.lambda}, {"a", r.a}, {"kcbs_value", r.kcbs_value}, {"ic_status", r.ic_status}};
    row["ic"] = r.ic ? json(*r.ic) : json(nullptr);
    row["cf"] = r.cf ? json(*r.cf) : json(nullptr);
    row["ic_residual"] = r.ic_residual ? json(*r.ic_residual) : json(nullptr);
    out.push_back(std::move(row));
  }
  return dump(out);
}

std::string cmd_transport(const Options& o) {
  format_of(o, "json", false);
  const auto l = load(o);
  TransportResult r;
  Eigen::VectorXd source, dest;
  if (l.builtin) {
    r = vertex_transport(o.from, o.to, o.tol);
    const auto nd = kcbs::nd_vertices();
    source = to_eigen(nd[o.from - 1]);
    dest = to_eigen(nd[o.to - 1]);
  } else {
    const auto vs = deterministic_vertices(l.scenario, l.embedding).distinct;
    if (o.from < 1 || o.from > vs.size() || o.to < 1 || o.to > vs.size())
      throw InvalidInput("vertex indices must lie in 1.." + std::to_string(vs.size()));
    source = to_eigen(vs[o.from - 1]);
    dest = to_eigen(vs[o.to - 1]);
    r = transport(preserving_system(l.scenario, l.embedding), l.embedding, source, dest, o.tol);
  }
  json j{{"from", o.from}, {"to", o.to}, {"feasible", r.feasible}, {"residual", r.residual}};
  if (!r.feasible || !r.map) throw Failed("no scenario-preserving map sends vertex " + std::to_string(o.from) +
                                         " to vertex " + std::to_string(o.to) + "\n" + dump(j));
  const auto pres = is_scenario_preserving(*r.map, l.embedding, o.tol);
  const auto image = reduced_map(*r.map, l.embedding).apply(source);
  j["preserving"] = pres.preserving;
  j["image_residual"] = (image - dest).cwiseAbs().maxCoeff();
  j["distance_to_identity"] = r.map->distance_to_identity();
  j["blocks"] = io::imm_to_json(*r.map)["blocks"];
  return dump(j);
}

std::string cmd_check_imm(const Options& o, int& status) {
  format_of(o, "json", false);
  if (o.file.empty()) throw InvalidInput("--file is required");
  const auto l = load(o);
  const auto blocks = io::imm_from_json(io::load_file(o.file));
  const auto w = Imm::from_exact(blocks);
  check_block_sizes(w, l.scenario);
  const bool exact = is_scenario_preserving_exact(blocks, l.embedding);
  const auto pres = is_scenario_preserving(w, l.embedding, o.tol);
  double most_negative = 0.0;
  for (const auto& b : w.blocks()) most_negative = std::min(most_negative, b.minCoeff());
  const bool valid = pres.preserving && most_negative >= -o.tol;
  json j{{"valid", valid},
         {"preserving", pres.preserving},
         {"exact", exact},
         {"violated", pres.violated},
         {"map_residual", pres.map_residual},
         {"offset_residual", pres.offset_residual},
         {"stochastic_residual", pres.stochastic_residual},
         {"most_negative_entry", most_negative},
         {"distance_to_identity", w.distance_to_identity()}};
  if (l.builtin) {
    const auto s = structural_checks(w);
    j["structural"] = {{"identity_blocks", s.identity_blocks},
                       {"neighbour_residual", s.neighbour_residual},
                       {"first_failure", s.first_failure},
                       {"contiguous", s.contiguous}};
  }
  if (!valid) status = kInvalidInput;
  return dump(j);
}

void write(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty() || o.out == "-") {
    out << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw InvalidInput("cannot write '" + o.out + "'");
  f << text;
  if (!f) throw InvalidInput("failed writing '" + o.out + "'");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Scenario-preserving invasive maps and contextuality quantifiers"};
  app.name("contextua");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--scenario", o.scenario, "built-in 'kcbs' or a scenario JSON file")->capture_default_str();
  app.add_option("--out", o.out, "output file (default stdout)");
  app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--policy", o.policy, "independent-coordinate policy for file scenarios: leading or trailing")
      ->check(CLI::IsMember({"leading", "trailing"}))
      ->capture_default_str();
  app.add_option("--starts", o.starts, "IC multistart count")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--seed", o.seed, "IC seed (default: $CONTEXTUA_SEED or built-in)");
  app.add_option("--tol", o.tol, "feasibility tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  auto add_target = [&](CLI::App* sub) {
    sub->add_option("--lambda", o.lambda, "mixing weight of the qutrit family")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--a", o.a, "amplitude of the qutrit family")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--q", o.q, "independent probabilities: JSON file, JSON array or comma list");
  };

  auto* derive = app.add_subcommand("derive", "emit M, V, T (self-test against the built-in kcbs data)");
  auto* vertices = app.add_subcommand("vertices", "emit the deterministic (or non-disturbance) vertices");
  vertices->add_option("--polytope", o.polytope, "nc or nd")->capture_default_str();
  auto* membership = app.add_subcommand("membership", "noncontextuality polytope membership");
  add_target(membership);
  membership->add_option("--polytope", o.polytope, "nc or nd")->capture_default_str();
  auto* facets = app.add_subcommand("facets", "facet slacks of q");
  add_target(facets);
  auto* ic = app.add_subcommand("ic", "invasiveness cost");
  add_target(ic);
  auto* cf = app.add_subcommand("cf", "contextual fraction");
  add_target(cf);
  cf->add_option("--norm", o.norm, "closed-form normalization: ndmax or one")->capture_default_str();
  auto* sw = app.add_subcommand("sweep", "IC and CF over the qutrit family");
  sw->add_option("--grid", o.grid, "lambda points x a points")->capture_default_str();
  sw->add_option("--which", o.which, "ic, cf or both")->capture_default_str();
  sw->add_option("--norm", o.norm, "closed-form normalization: ndmax or one")->capture_default_str();
  auto* tr = app.add_subcommand("transport", "scenario-preserving map between two vertices (1-based)");
  tr->add_option("--from", o.from)->required();
  tr->add_option("--to", o.to)->required();
  auto* check = app.add_subcommand("check-imm", "validate an IMM given as JSON blocks");
  check->add_option("--file", o.file, "IMM JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  int status = kOk;
  try {
    std::string text;
    if (derive->parsed()) text = cmd_derive(o);
    else if (vertices->parsed()) text = cmd_vertices(o);
    else if (membership->parsed()) text = cmd_membership(o);
    else if (facets->parsed()) text = cmd_facets(o);
    else if (ic->parsed()) text = cmd_ic(o);
    else if (cf->parsed()) text = cmd_cf(o);
    else if (sw->parsed()) text = cmd_sweep(o);
    else if (tr->parsed()) text = cmd_transport(o);
    else if (check->parsed()) text = cmd_check_imm(o, status);
    write(o, text, out);
    if (status != kOk) err << "error: the map is not a valid scenario-preserving IMM\n";
    return status;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const Failed& e) {
    err << "solver failure: " << e.what();
    return kSolverFailure;
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kSolverFailure;
  }
}

}  // namespace contextua::cli
