#include <doctest.h>

#include <random>

#include "contextua/errors.hpp"
#include "contextua/imm.hpp"
#include "contextua/kcbs_data.hpp"
#include "contextua/polytope.hpp"
#include "helpers.hpp"

using namespace contextua;

namespace {

RationalMatrix stack(const RationalMatrix& a, const RationalMatrix& b) {
  std::vector<RationalVector> rows;
  for (std::size_t r = 0; r < a.rows(); ++r) rows.push_back(a.row(r));
  for (std::size_t r = 0; r < b.rows(); ++r) rows.push_back(b.row(r));
  return RationalMatrix::from_rows(rows);
}

Eigen::VectorXd nd_point(std::mt19937_64& rng) {
  return kcbs_nd_polytope().matrix() * testing::dirichlet(rng, 48, 0.5);
}

// The LP's 1 -> 48 map has entries in {0, 1/2, 1}, so its exact copy is exact.
ExactBlocks transport_1_48() {
  static const ExactBlocks w = testing::exact_blocks(*vertex_transport(1, 48).map);
  return w;
}

const ImmSampler& kcbs_sampler() {
  static const ImmSampler s(kcbs_constraints());
  return s;
}

}  // namespace

TEST_CASE("Imm construction and basic accessors") {
  CHECK_THROWS_AS(Imm({Eigen::MatrixXd(2, 3)}), InvalidInput);
  CHECK_THROWS_AS(Imm({Eigen::MatrixXd(0, 0)}), InvalidInput);
  const auto id = Imm::identity(kcbs::scenario());
  CHECK(id.dimension() == 20);
  CHECK(id.entry_count() == 80);
  CHECK(id.block_sizes() == std::vector<std::size_t>(5, 4));
  CHECK(id.distance_to_identity() == 0.0);
  CHECK(id.is_stochastic());
  CHECK(id.dense() == Eigen::MatrixXd::Identity(20, 20));
  const auto round = Imm::from_flat(id.flat(), id.block_sizes());
  CHECK(round.dense() == id.dense());
  CHECK_THROWS_AS(Imm::from_flat(Eigen::VectorXd::Zero(79), id.block_sizes()), InvalidInput);
  // Flat layout: block i, row j, column k at 16 i + 4 j + k.
  const auto w = Imm::from_exact(transport_1_48());
  CHECK(w.flat()(16 * 2 + 4 * 1 + 3) == w.block(2)(1, 3));
  CHECK_THROWS_AS(check_block_sizes(Imm::identity({4, 4}), kcbs::scenario()), InvalidInput);
}

TEST_CASE("KCBS system has rank 50 and a 30-dimensional solution space") {
  const auto sys = kcbs_constraints();
  CHECK(sys.a.rows() == 50);
  CHECK(sys.entry_count() == 80);
  CHECK(sys.labels.size() == 50);
  CHECK(rank(sys.a) == 50);
  CHECK(null_space(sys.a).basis.cols() == 30);
  CHECK(sys.satisfied_exactly(flatten(identity_blocks(sys.block_sizes))));
  CHECK(sys.satisfied_exactly(flatten(transport_1_48())));
}

TEST_CASE("the KCBS rows span the same space as the derived identities") {
  const auto scenario = kcbs::scenario();
  const auto emb = kcbs::embedding();
  const auto derived = preserving_system(scenario, emb);
  const auto kcbs = kcbs_constraints();
  CHECK(rank(derived.a) == 50);
  CHECK(rank(stack(derived.a, kcbs.a)) == 50);
  CHECK(is_scenario_preserving_exact(transport_1_48(), emb));
  CHECK(is_scenario_preserving_exact(identity_blocks(kcbs.block_sizes), emb));
}

TEST_CASE("a perturbed map names the identity it breaks") {
  const auto emb = kcbs::embedding();
  auto blocks = identity_blocks({4, 4, 4, 4, 4});
  // Move mass from ++ to +- in context 1: stochastic, not preserving.
  blocks[0](0, 0) = Rational(9, 10);
  blocks[0](1, 0) = Rational(1, 10);
  CHECK(!is_scenario_preserving_exact(blocks, emb));
  const auto rep = is_scenario_preserving(Imm::from_exact(blocks), emb);
  CHECK(!rep.preserving);
  CHECK(rep.violated == "M T W M = W M");
  CHECK(rep.stochastic_residual <= 1e-15);
  CHECK(!kcbs_constraints().satisfied_exactly(flatten(blocks)));

  auto scaled = Imm(std::vector<Eigen::MatrixXd>(5, 2.0 * Eigen::Matrix4d::Identity()));
  CHECK(is_scenario_preserving(scaled, emb).violated == "M T W V = (W - 1) V");
  const auto ok = is_scenario_preserving(Imm::identity(kcbs::scenario()), emb);
  CHECK(ok.preserving);
  CHECK(ok.violated.empty());
}

TEST_CASE("sampled maps satisfy both formulations") {
  const auto emb = kcbs::embedding();
  const auto derived = preserving_system(kcbs::scenario(), emb);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto w = kcbs_sampler().sample(seed);
    CHECK(w.is_stochastic(1e-9));
    CHECK(is_scenario_preserving(w, emb).preserving);
    CHECK(derived.residual(w.flat()) <= 1e-9);
    CHECK(kcbs_constraints().residual(w.flat()) <= 1e-9);
  }
  CHECK(kcbs_sampler().sample(3).flat() == kcbs_sampler().sample(3).flat());
  CHECK(kcbs_sampler().sample(3).flat() != kcbs_sampler().sample(4).flat());
}

TEST_CASE("embedding and simulation commute through the reduced map") {
  const auto emb = kcbs::embedding();
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const auto w = kcbs_sampler().sample(seed);
    const auto red = reduced_map(w, emb);
    const Eigen::VectorXd c = nd_point(rng);
    const Eigen::VectorXd full = simulate(w, embed(emb, {c})).values;
    CHECK((embed(emb, {red.apply(c)}).values - full).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(nondisturbance_contains(emb, red.apply(c), 1e-12));
  }
  const auto exact = transport_1_48();
  const auto red = reduced_map_exact(exact, emb);
  const auto e1 = kcbs::nc_vertices()[0];
  CHECK(red.z * e1 + red.v == kcbs::nd_vertices()[47]);
  CHECK(emb.embed_exact(red.z * e1 + red.v) == simulate_exact(exact, emb.embed_exact(e1)));
  CHECK_THROWS_AS(simulate(Imm::identity(kcbs::scenario()), FullProbVector{Eigen::VectorXd::Zero(3)}), InvalidInput);
}

TEST_CASE("parametrization by free entries round-trips") {
  const auto par = parametrize_kcbs();
  REQUIRE(par.parameter_count() == 30);
  CHECK(par.free_entries.size() == 30);
  const auto sys = kcbs_constraints();
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd y(30);
    for (auto& x : y) x = g(rng);
    const Eigen::VectorXd w = par.w_of_y(y);
    CHECK(sys.residual(w) <= 1e-12);
    CHECK((par.y_of_w(w) - y).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((par.positivity(y) + w).cwiseAbs().maxCoeff() == 0.0);
  }
  const auto exact = flatten(transport_1_48());
  CHECK(par.w_of_y_exact(par.y_of_w_exact(exact)) == exact);
  const auto id = Imm::identity(kcbs::scenario());
  CHECK(par.imm_of_y(par.y_of_w(id.flat())).dense() == id.dense());
  CHECK(par.positivity(par.y_of_w(id.flat())).maxCoeff() <= 0.0);
}

TEST_CASE("cyclic contiguity") {
  CHECK(cyclically_contiguous({false, false, false, false, false}));
  CHECK(cyclically_contiguous({true, true, true, true, true}));
  CHECK(cyclically_contiguous({true, false, false, true, true}));
  CHECK(cyclically_contiguous({false, true, true, false, false}));
  CHECK(!cyclically_contiguous({true, false, true, false, false}));
  CHECK(!cyclically_contiguous({false, true, false, true, true}));
}

TEST_CASE("identity blocks constrain their neighbours") {
  const auto id = structural_checks(Imm::identity(kcbs::scenario()));
  CHECK(id.neighbour_residual == 0.0);
  CHECK(id.contiguous);
  const auto sys = kcbs_constraints();
  for (std::size_t pin = 0; pin < 5; ++pin) {
    const ImmSampler s(sys, {pin});
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto w = s.sample(seed);
      const auto rep = structural_checks(w);
      CHECK(rep.identity_blocks[pin]);
      CHECK(rep.neighbour_residual <= 1e-9);
      CHECK(rep.middle_reading_holds);
      CHECK(rep.literal_reading_holds);
      CHECK(rep.contiguous);
    }
  }
  // Identity at i and i - 2 pins the block between them.
  const ImmSampler two(sys, {0, 2});
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto w = two.sample(seed);
    CHECK((w.block(1) - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(structural_checks(w).middle_reading_holds);
  }
  const ImmSampler far(sys, {1, 4});
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto w = far.sample(seed);
    CHECK(structural_checks(w).contiguous);
  }
}

TEST_CASE("structural report names a broken neighbour condition") {
  auto blocks = std::vector<Eigen::MatrixXd>(5, Eigen::Matrix4d::Identity());
  blocks[1](0, 2) = 0.25;
  blocks[1](2, 2) = 0.75;
  const auto rep = structural_checks(Imm(blocks));
  CHECK(rep.neighbour_residual == doctest::Approx(0.25));
  CHECK(rep.first_failure == "identity block 1: next W11 = W33");
  CHECK_THROWS_AS(structural_checks(Imm::identity({2, 2})), InvalidInput);
}

TEST_CASE("transport between vertices") {
  const auto emb = kcbs::embedding();
  const auto nd = kcbs::nd_vertices();
  const auto t = vertex_transport(1, 48);
  REQUIRE(t.feasible);
  REQUIRE(t.map.has_value());
  CHECK(t.residual <= 1e-9);
  CHECK(is_scenario_preserving(*t.map, emb).preserving);
  CHECK((reduced_map(*t.map, emb).apply(to_eigen(nd[0])) - to_eigen(nd[47])).cwiseAbs().maxCoeff() <= 1e-9);

  const auto self = vertex_transport(5, 5);
  REQUIRE(self.feasible);
  CHECK(self.map->distance_to_identity() <= 1e-9);

  CHECK_THROWS_AS(vertex_transport(0, 3), InvalidInput);
  CHECK_THROWS_AS(vertex_transport(1, 49), InvalidInput);
  Eigen::VectorXd bad = to_eigen(nd[0]);
  bad(0) = 2.0;
  CHECK(!transport(kcbs_constraints(), emb, to_eigen(nd[0]), bad).feasible);
}

TEST_CASE("scenario-preserving maps form a convex set") {
  const auto emb = kcbs::embedding();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u;
  for (std::uint64_t seed = 40; seed < 50; ++seed) {
    const auto a = kcbs_sampler().sample(seed).flat();
    const auto b = kcbs_sampler().sample(seed + 100).flat();
    const double t = u(rng);
    const auto mix = Imm::from_flat(t * a + (1 - t) * b, std::vector<std::size_t>(5, 4));
    CHECK(is_scenario_preserving(mix, emb).preserving);
  }
}

TEST_CASE("stochastic maps do not expand total variation") {
  const auto emb = kcbs::embedding();
  std::mt19937_64 rng(23);
  for (std::uint64_t seed = 60; seed < 70; ++seed) {
    const auto w = kcbs_sampler().sample(seed);
    const auto c1 = embed(emb, {nd_point(rng)});
    const auto c2 = embed(emb, {nd_point(rng)});
    const double before = (c1.values - c2.values).lpNorm<1>();
    const double after = (simulate(w, c1).values - simulate(w, c2).values).lpNorm<1>();
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("identity reduces to the identity affine map") {
  const auto red = reduced_map(Imm::identity(kcbs::scenario()), kcbs::embedding());
  CHECK(red.z == Eigen::MatrixXd::Identity(10, 10));
  CHECK(red.v.isZero());
}

TEST_CASE("a large negative parameter is flagged by positivity") {
  const auto par = parametrize_kcbs();
  Eigen::VectorXd y = par.y_of_w(Imm::identity(kcbs::scenario()).flat());
  y(7) = -50.0;
  CHECK(par.positivity(y).maxCoeff() > 0.0);
  CHECK(!par.imm_of_y(y).is_stochastic());
}

TEST_CASE("mixing transport maps mixes their targets") {
  const auto emb = kcbs::embedding();
  const auto nd = kcbs::nd_vertices();
  std::mt19937_64 rng(31);
  const Eigen::VectorXd lambda = testing::dirichlet(rng, 48, 1.0);
  Eigen::VectorXd mix = Eigen::VectorXd::Zero(80);
  Eigen::VectorXd expect = Eigen::VectorXd::Zero(20);
  for (std::size_t b = 0; b < 48; ++b) {
    const auto t = vertex_transport(1, b + 1);
    REQUIRE(t.feasible);
    mix += lambda(static_cast<Eigen::Index>(b)) * t.map->flat();
    expect += lambda(static_cast<Eigen::Index>(b)) * embed(emb, {to_eigen(nd[b])}).values;
  }
  const auto w = Imm::from_flat(mix, std::vector<std::size_t>(5, 4));
  CHECK(is_scenario_preserving(w, emb).preserving);
  CHECK((simulate(w, embed(emb, {to_eigen(nd[0])})).values - expect).cwiseAbs().maxCoeff() <= 1e-9);
}
