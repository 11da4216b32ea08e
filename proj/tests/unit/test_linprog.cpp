#include <doctest.h>

#include <random>
#include <sstream>

#include "contextua/errors.hpp"
#include "contextua/kcbs_data.hpp"
#include "contextua/linprog.hpp"
#include "contextua/quantum_kcbs.hpp"
#include "helpers.hpp"

using namespace contextua;
using lp::LpProblem;
using lp::LpStatus;

namespace {

/// Best objective over all basic solutions of min c.x, A x <= b, 0 <= x <= 1,
/// or nullopt when none is feasible.
std::optional<double> brute_force(const LpProblem& p) {
  const auto n = static_cast<Eigen::Index>(p.num_vars());
  const auto m = p.a_ub.rows();
  Eigen::MatrixXd g(m + 2 * n, n);
  Eigen::VectorXd h(m + 2 * n);
  g << p.a_ub, Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
  h << p.b_ub, Eigen::VectorXd::Ones(n), Eigen::VectorXd::Zero(n);
  std::optional<double> best;
  const auto rows = g.rows();
  std::vector<bool> pick(static_cast<std::size_t>(rows), false);
  std::fill(pick.begin(), pick.begin() + n, true);
  do {
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd r(n);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
      if (pick[static_cast<std::size_t>(i)]) {
        a.row(k) = g.row(i);
        r(k++) = h(i);
      }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() < n) continue;
    const Eigen::VectorXd x = lu.solve(r);
    if (((g * x - h).array() > 1e-9).any()) continue;
    const double v = p.objective.dot(x);
    if (!best || v < *best) best = v;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

LpProblem kcbs_feasibility(const Eigen::VectorXd& q) {
  const Eigen::MatrixXd ef = testing::columns(kcbs::nc_vertices());
  LpProblem p(32);
  p.objective.setZero();
  p.a_eq.resize(11, 32);
  p.a_eq << ef, Eigen::RowVectorXd::Ones(32);
  p.b_eq.resize(11);
  p.b_eq << q, 1.0;
  return p;
}

}  // namespace

TEST_CASE("small LP with known optimum") {
  // max 3x + 2y  s.t. x + y <= 4, x + 3y <= 6, x <= 3
  LpProblem p(2);
  p.sense = LpProblem::Sense::Maximize;
  p.objective << 3, 2;
  p.a_ub.resize(2, 2);
  p.a_ub << 1, 1, 1, 3;
  p.b_ub.resize(2);
  p.b_ub << 4, 6;
  p.upper = Eigen::Vector2d(3, lp::kInf);
  const auto s = lp::solve(p);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(11.0));
  CHECK(s.x(0) == doctest::Approx(3.0));
  CHECK(s.x(1) == doctest::Approx(1.0));
  CHECK(s.max_residual <= 1e-12);
}

TEST_CASE("equalities, free variables and negative bounds") {
  // min x - y  s.t. x + y = 1, -2 <= x <= 2, y free
  LpProblem p(2);
  p.objective << 1, -1;
  p.a_eq.resize(1, 2);
  p.a_eq << 1, 1;
  p.b_eq.resize(1);
  p.b_eq << 1;
  p.lower = Eigen::Vector2d(-2, -lp::kInf);
  p.upper = Eigen::Vector2d(2, lp::kInf);
  const auto s = lp::solve(p);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-5.0));
  CHECK(s.x(0) == doctest::Approx(-2.0));
  CHECK(s.x(1) == doctest::Approx(3.0));
}

TEST_CASE("infeasible and unbounded problems") {
  LpProblem inf(1);
  inf.objective << 1;
  inf.a_ub.resize(1, 1);
  inf.a_ub << 1;
  inf.b_ub.resize(1);
  inf.b_ub << -1;
  CHECK(lp::solve(inf).status == LpStatus::Infeasible);

  LpProblem unb(2);
  unb.sense = LpProblem::Sense::Maximize;
  unb.objective << 1, 1;
  unb.a_ub.resize(1, 2);
  unb.a_ub << 1, -1;
  unb.b_ub.resize(1);
  unb.b_ub << 1;
  CHECK(lp::solve(unb).status == LpStatus::Unbounded);
  CHECK(std::string(lp::to_string(LpStatus::Unbounded)) == "unbounded");
}

TEST_CASE("shape errors are reported") {
  LpProblem p(2);
  p.objective.setZero();
  p.a_eq.resize(1, 3);
  p.b_eq.resize(1);
  CHECK_THROWS_AS(lp::solve(p), InvalidInput);
  LpProblem q(1);
  q.objective << 0;
  q.lower = Eigen::VectorXd::Constant(1, 2.0);
  q.upper = Eigen::VectorXd::Constant(1, 1.0);
  CHECK_THROWS_AS(lp::solve(q), InvalidInput);
}

TEST_CASE("random LPs agree with vertex enumeration") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> nv(1, 4), nc(0, 6);
  std::normal_distribution<double> g;
  int feasible = 0, infeasible = 0;
  for (int t = 0; t < 300; ++t) {
    const int n = nv(rng), m = nc(rng);
    LpProblem p(static_cast<std::size_t>(n));
    for (auto& c : p.objective) c = g(rng);
    p.a_ub.resize(m, n);
    p.b_ub.resize(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) p.a_ub(i, j) = g(rng);
      p.b_ub(i) = 0.5 * g(rng);
    }
    p.upper = Eigen::VectorXd::Ones(n);
    const auto expect = brute_force(p);
    const auto s = lp::solve(p);
    if (expect) {
      ++feasible;
      REQUIRE(s.status == LpStatus::Optimal);
      CHECK(s.objective == doctest::Approx(*expect).epsilon(1e-8));
      CHECK(s.max_residual <= 1e-9);
    } else {
      ++infeasible;
      CHECK(s.status == LpStatus::Infeasible);
    }
  }
  CHECK(feasible > 50);
  CHECK(infeasible > 10);
}

TEST_CASE("KCBS decomposition feasibility") {
  const auto e1 = lp::solve(kcbs_feasibility(to_eigen(kcbs::nc_vertices()[0])));
  REQUIRE(e1.status == LpStatus::Optimal);
  CHECK(e1.x.sum() == doctest::Approx(1.0));
  const auto q11 = quantum::probabilities({1.0, 1.0}).values;
  CHECK(lp::solve(kcbs_feasibility(q11)).status == LpStatus::Infeasible);
  const auto q03 = quantum::probabilities({0.3, 1.0}).values;
  CHECK(lp::solve(kcbs_feasibility(q03)).status == LpStatus::Optimal);
}

TEST_CASE("solver is deterministic") {
  const auto p = kcbs_feasibility(quantum::probabilities({0.5, 0.7}).values);
  const auto a = lp::solve(p);
  const auto b = lp::solve(p);
  REQUIRE(a.status == LpStatus::Optimal);
  CHECK(a.iterations == b.iterations);
  CHECK((a.x.array() == b.x.array()).all());
  std::ostringstream trace;
  lp::LpOptions opt;
  opt.trace = &trace;
  CHECK((lp::solve(p, opt).x.array() == a.x.array()).all());
  CHECK(!trace.str().empty());
}
