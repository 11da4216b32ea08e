#pragma once

#include <vector>

#include "contextua/rational.hpp"
#include "contextua/scenario.hpp"

/// Reference data for the KCBS 5-cycle: observables A1..A5 with outcomes
/// {+1, -1}, contexts (A1,A2), (A2,A3), (A3,A4), (A4,A5), (A5,A1). The
/// independent coordinates are the (++) and (+-) probabilities of each
/// context, in context order.
namespace contextua::kcbs {

inline constexpr std::size_t kContexts = 5;
inline constexpr std::size_t kBlock = 4;
inline constexpr std::size_t kFullDim = 20;
inline constexpr std::size_t kIndepDim = 10;
inline constexpr std::size_t kImmEntries = 80;

MarginalScenario scenario();

/// Hard-coded T, M, V (not derived).
AffineEmbedding embedding();

/// The 32 deterministic points, assignment (+1,...,+1) first.
std::vector<RationalVector> nc_vertices();
/// The 16 facet normals and bounds of the noncontextuality polytope.
std::vector<RationalVector> facet_normals();
RationalVector facet_bounds();
/// The 32 noncontextual points followed by the 16 half-integral ones.
std::vector<RationalVector> nd_vertices();

/// The widely circulated example "1 -> 48" map, five 4x4 blocks, entered
/// verbatim. Beware: every block keeps the ++ column at (1, 0, 0, 0), so it
/// fixes vertex 1, and W13 + W23 = W14 + W24 fails in contexts 1, 3, 4, 5.
/// vertex_transport(1, 48) returns a map that does the job.
std::vector<RationalMatrix> transport_1_to_48_blocks();

}  // namespace contextua::kcbs
