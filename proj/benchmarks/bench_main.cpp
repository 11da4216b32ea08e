#include <benchmark/benchmark.h>

#include "contextua/imm.hpp"
#include "contextua/kcbs_data.hpp"
#include "contextua/linprog.hpp"
#include "contextua/polytope.hpp"
#include "contextua/quantifiers.hpp"
#include "contextua/quantum_kcbs.hpp"

using namespace contextua;

static void BM_DeriveEmbedding(benchmark::State& state) {
  const auto s = kcbs::scenario();
  for (auto _ : state) benchmark::DoNotOptimize(derive_embedding(s));
}
BENCHMARK(BM_DeriveEmbedding);

// Random dense LP: maximize c.x subject to A x <= b, 0 <= x <= 1.
static void BM_SimplexDense(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::srand(7);
  lp::LpProblem p(static_cast<std::size_t>(n));
  p.sense = lp::LpProblem::Sense::Maximize;
  p.objective = Eigen::VectorXd::Random(n);
  p.a_ub = Eigen::MatrixXd::Random(n, n);
  p.b_ub = Eigen::VectorXd::Ones(n);
  p.upper = Eigen::VectorXd::Ones(n);
  for (auto _ : state) benchmark::DoNotOptimize(lp::solve(p));
}
BENCHMARK(BM_SimplexDense)->Arg(10)->Arg(40)->Arg(100);

static void BM_MembershipLp(benchmark::State& state) {
  const auto [poly, fs] = kcbs_nc_polytope();
  const auto q = quantum::probabilities({state.range(0) / 100.0, 1.0}).values;
  for (auto _ : state) benchmark::DoNotOptimize(member(poly, q));
}
BENCHMARK(BM_MembershipLp)->Arg(30)->Arg(100);

static void BM_FacetCheck(benchmark::State& state) {
  const auto fs = kcbs_nc_polytope().second;
  const auto q = quantum::probabilities({1.0, 1.0}).values;
  for (auto _ : state) benchmark::DoNotOptimize(facet_check(fs, q));
}
BENCHMARK(BM_FacetCheck);

static void BM_VertexTransport(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(vertex_transport(1, 48));
}
BENCHMARK(BM_VertexTransport)->Unit(benchmark::kMillisecond);

static void BM_ContextualFraction(benchmark::State& state) {
  const auto q = quantum::probabilities({1.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(contextual_fraction(q));
}
BENCHMARK(BM_ContextualFraction)->Unit(benchmark::kMillisecond);

// One multistart of the invasiveness cost; lambda = 1, a = range / 100.
static void BM_IcSingleStart(benchmark::State& state) {
  const auto problem = IcProblem::kcbs();
  const auto q = quantum::probabilities({1.0, state.range(0) / 100.0});
  IcConfig cfg;
  cfg.starts = 1;
  cfg.upper_bound = false;
  for (auto _ : state) benchmark::DoNotOptimize(invasiveness_cost(problem, q, cfg));
}
BENCHMARK(BM_IcSingleStart)->Arg(100)->Arg(95)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
