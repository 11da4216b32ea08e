#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "contextua/json_io.hpp"
#include "contextua/kcbs_data.hpp"

using namespace contextua;

namespace {

struct Outcome {
  int status;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "contextua");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

io::json parsed(const Outcome& o) { return io::parse(o.out, "cli output"); }

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("contextua_cli_" + name);
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST_CASE("derive reproduces the built-in data and re-ingests") {
  const auto r = run({"derive"});
  REQUIRE(r.status == cli::kOk);
  const auto j = parsed(r);
  CHECK(j["self_test"] == "pass");
  CHECK(io::embedding_from_json(j) == kcbs::embedding());
}

TEST_CASE("vertices") {
  auto r = run({"vertices"});
  REQUIRE(r.status == cli::kOk);
  CHECK(parsed(r)["count"] == 32);
  CHECK(io::vertices_from_json(parsed(r)) == kcbs::nc_vertices());
  r = run({"vertices", "--polytope", "nd", "--format", "csv"});
  REQUIRE(r.status == cli::kOk);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 48);
  CHECK(r.out.find("1/2") != std::string::npos);
}

TEST_CASE("membership of the first vertex") {
  const auto path = temp_file("e1.json", R"({"q": ["1", "0", "1", "0", "1", "0", "1", "0", "1", "0"]})");
  const auto r = run({"membership", "--scenario", "kcbs", "--q", path});
  REQUIRE(r.status == cli::kOk);
  const auto j = parsed(r);
  CHECK(j["inside"] == true);
  CHECK(j["weights"][0].get<double>() == doctest::Approx(1.0));

  const auto out = run({"membership", "--lambda", "1", "--a", "1"});
  CHECK(parsed(out)["inside"] == false);
  CHECK(parsed(out).contains("separator_normal"));
}

TEST_CASE("facets") {
  const auto j = parsed(run({"facets", "--lambda", "1", "--a", "1"}));
  CHECK(j["location"] == "outside");
  CHECK(j["most_violated"] == 0);
  CHECK(j["max_slack"].get<double>() == doctest::Approx(std::sqrt(5.0) - 2.0));
}

TEST_CASE("ic reports value, witness, residual and the KCBS value") {
  const auto r = run({"ic", "--scenario", "kcbs", "--lambda", "1", "--a", "1", "--starts", "4"});
  REQUIRE(r.status == cli::kOk);
  const auto j = parsed(r);
  CHECK(j["status"] == "converged");
  CHECK(j["kcbs_value"].get<double>() == doctest::Approx(2.2360680).epsilon(1e-7));
  CHECK(j["value"].get<double>() > 1.8);
  CHECK(j["residual"].get<double>() <= 1e-6);
  CHECK(j["witness"].size() == 5);

  // The emitted witness passes the validator.
  const auto path = temp_file("witness.json", io::json{{"blocks", j["witness"]}}.dump());
  const auto check = run({"check-imm", "--file", path, "--tol", "1e-6"});
  CHECK(check.status == cli::kOk);
  CHECK(parsed(check)["valid"] == true);

  const auto zero = parsed(run({"ic", "--lambda", "0.3", "--a", "1"}));
  CHECK(zero["status"] == "boundary-zero");
  CHECK(zero["value"] == 0.0);
}

TEST_CASE("cf under both normalizations") {
  auto j = parsed(run({"cf", "--lambda", "1", "--a", "1"}));
  CHECK(j["value"].get<double>() == doctest::Approx(j["formula_value"].get<double>()).epsilon(1e-9));
  j = parsed(run({"cf", "--lambda", "1", "--a", "1", "--norm", "one"}));
  CHECK(j["formula_value"].get<double>() == doctest::Approx((std::sqrt(5.0) - 2.0) / 3.0));
}

TEST_CASE("transport writes a map that re-ingests exactly") {
  const auto out = (std::filesystem::temp_directory_path() / "contextua_cli_t148.json").string();
  const auto r = run({"transport", "--from", "1", "--to", "48", "--out", out});
  REQUIRE(r.status == cli::kOk);
  CHECK(r.out.empty());
  const auto j = io::load_file(out);
  CHECK(j["preserving"] == true);
  CHECK(j["image_residual"].get<double>() <= 1e-9);
  const auto check = run({"check-imm", "--file", out});
  CHECK(check.status == cli::kOk);
  CHECK(parsed(check)["exact"] == true);
  CHECK(run({"transport", "--from", "0", "--to", "48"}).status == cli::kInvalidInput);
}

TEST_CASE("check-imm rejects bad maps with precise diagnostics") {
  auto path = temp_file("bad_syntax.json", "{\n  \"blocks\": [\n    [[1, 0], [0 1]]\n  ]\n}\n");
  auto r = run({"check-imm", "--file", path});
  CHECK(r.status == cli::kInvalidInput);
  CHECK(r.err.find("bad_syntax.json:3:") != std::string::npos);

  path = temp_file("bad_field.json", R"({"blocks": [[[1, 0], [0, "one"]]]})");
  r = run({"check-imm", "--file", path});
  CHECK(r.status == cli::kInvalidInput);
  CHECK(r.err.find("blocks[0][1][1]") != std::string::npos);

  path = temp_file("bad_dims.json", R"({"blocks": [[[1, 0], [0, 1]]]})");
  r = run({"check-imm", "--file", path});
  CHECK(r.status == cli::kInvalidInput);
  CHECK(r.err.find("block") != std::string::npos);

  io::json doubled = io::imm_to_json(identity_blocks({4, 4, 4, 4, 4}));
  doubled["blocks"][2][0][0] = "2";
  path = temp_file("doubled.json", doubled.dump());
  r = run({"check-imm", "--file", path});
  CHECK(r.status == cli::kInvalidInput);
  CHECK(parsed(r)["valid"] == false);
}

TEST_CASE("sweep output is byte-identical for identical configurations") {
  const std::vector<std::string> args{"sweep", "--grid", "3x3", "--starts", "2", "--seed", "7"};
  const auto a = run(args);
  REQUIRE(a.status == cli::kOk);
  CHECK(a.out.rfind("lambda,a,kcbs_value,ic,cf,ic_status,ic_residual\n", 0) == 0);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 10);
  CHECK(run(args).out == a.out);
  auto threaded = args;
  threaded.insert(threaded.end(), {"--threads", "3"});
  CHECK(run(threaded).out == a.out);

  ::setenv("CONTEXTUA_SEED", "7", 1);
  CHECK(run({"sweep", "--grid", "3x3", "--starts", "2"}).out == a.out);
  ::setenv("CONTEXTUA_SEED", "seven", 1);
  CHECK(run({"sweep", "--grid", "3x3", "--starts", "2"}).status == cli::kInvalidInput);
  ::unsetenv("CONTEXTUA_SEED");

  const auto json_rows = parsed(run({"sweep", "--grid", "2x2", "--which", "cf", "--format", "json"}));
  CHECK(json_rows.size() == 4);
  CHECK(json_rows[3]["ic"].is_null());
  CHECK(run({"sweep", "--grid", "20"}).status == cli::kInvalidInput);
}

TEST_CASE("scenario files") {
  const auto path = temp_file("triangle.json", R"({
    "observables": [{"id": "A", "outcomes": [1, -1]}, {"id": "B", "outcomes": [1, -1]},
                    {"id": "C", "outcomes": [1, -1]}],
    "contexts": [["A", "B"], ["B", "C"], ["C", "A"]]
  })");
  auto r = run({"derive", "--scenario", path});
  REQUIRE(r.status == cli::kOk);
  CHECK(parsed(r)["indep_dim"] == 6);
  CHECK_FALSE(parsed(r).contains("self_test"));

  r = run({"vertices", "--scenario", path});
  REQUIRE(r.status == cli::kOk);
  const auto vs = io::vertices_from_json(parsed(r));
  CHECK(vs.size() == 8);

  io::json q = io::json::array();
  for (const auto& x : vs[3]) q.push_back(io::to_json(x));
  const auto cf = run({"cf", "--scenario", path, "--q", q.dump()});
  REQUIRE(cf.status == cli::kOk);
  CHECK(std::abs(parsed(cf)["value"].get<double>()) <= 1e-9);

  const auto ic = run({"ic", "--scenario", path, "--q", q.dump(), "--starts", "2"});
  REQUIRE(ic.status == cli::kOk);
  CHECK(parsed(ic)["status"] == "boundary-zero");

  CHECK(run({"transport", "--scenario", path, "--from", "1", "--to", "8"}).status == cli::kOk);
  CHECK(run({"facets", "--scenario", path, "--q", q.dump()}).status == cli::kInvalidInput);
  CHECK(run({"ic", "--scenario", path, "--lambda", "1", "--a", "1"}).status == cli::kInvalidInput);
  CHECK(run({"derive", "--scenario", "/nonexistent.json"}).status == cli::kInvalidInput);
}

TEST_CASE("argument errors exit with status 1") {
  CHECK(run({}).status == cli::kInvalidInput);
  CHECK(run({"bogus"}).status == cli::kInvalidInput);
  CHECK(run({"ic", "--lambda", "1"}).status == cli::kInvalidInput);
  CHECK(run({"ic", "--lambda", "2", "--a", "1"}).status == cli::kInvalidInput);
  CHECK(run({"ic", "--q", "0.6,0.6,0.6,0.6,0.6,0.6,0.6,0.6,0.6,0.6"}).status == cli::kInvalidInput);
  const auto r = run({"membership", "--q", "[1, 0]"});
  CHECK(r.status == cli::kInvalidInput);
  CHECK(r.err.find("q has 2 entries; the scenario needs 10") != std::string::npos);
  CHECK(run({"ic", "--lambda", "1", "--a", "1", "--format", "csv"}).status == cli::kInvalidInput);
  CHECK(run({"--help"}).status == cli::kOk);
}
