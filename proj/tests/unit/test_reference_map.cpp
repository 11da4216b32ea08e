// Claims made for the hard-coded 1 -> 48 example map. They do not hold for
// the matrix as printed (it fixes vertex 1 and breaks W13 + W23 = W14 + W24
// in four contexts); ctest expects this executable to fail.
#include <doctest.h>

#include "contextua/imm.hpp"
#include "contextua/kcbs_data.hpp"

using namespace contextua;

TEST_CASE("example 1->48 map satisfies the KCBS system exactly") {
  CHECK(kcbs_constraints().satisfied_exactly(flatten(kcbs::transport_1_to_48_blocks())));
}

TEST_CASE("example 1->48 map is scenario-preserving") {
  const auto w = kcbs::transport_1_to_48_blocks();
  CHECK(is_scenario_preserving_exact(w, kcbs::embedding()));
  CHECK(is_scenario_preserving(Imm::from_exact(w), kcbs::embedding()).preserving);
}

TEST_CASE("example 1->48 map sends vertex 1 to vertex 48") {
  const auto emb = kcbs::embedding();
  const auto w = kcbs::transport_1_to_48_blocks();
  const auto red = reduced_map_exact(w, emb);
  CHECK(red.z * kcbs::nd_vertices()[0] + red.v == kcbs::nd_vertices()[47]);
  CHECK(simulate_exact(w, emb.embed_exact(kcbs::nd_vertices()[0])) == emb.embed_exact(kcbs::nd_vertices()[47]));
}

TEST_CASE("example 1->48 map survives the parametrization round trip") {
  const auto par = parametrize_kcbs();
  const auto w = flatten(kcbs::transport_1_to_48_blocks());
  CHECK(par.w_of_y_exact(par.y_of_w_exact(w)) == w);
}
