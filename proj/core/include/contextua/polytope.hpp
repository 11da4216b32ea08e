#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "contextua/rational.hpp"
#include "contextua/scenario.hpp"

namespace contextua {

/// Convex hull of finitely many exact points.
class VertexPolytope {
 public:
  explicit VertexPolytope(std::vector<RationalVector> vertices);

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return vertices_.size(); }
  const std::vector<RationalVector>& vertices() const { return vertices_; }
  /// dimension x size, one vertex per column.
  const Eigen::MatrixXd& matrix() const { return mat_; }

 private:
  std::vector<RationalVector> vertices_;
  std::size_t dim_ = 0;
  Eigen::MatrixXd mat_;
};

/// Half-space description {p : f_i . p <= b_i}.
struct FacetSystem {
  std::vector<RationalVector> normals;
  RationalVector bounds;
  std::vector<bool> trivial;  ///< positivity-type facets

  std::size_t size() const { return normals.size(); }
  std::size_t dimension() const { return normals.empty() ? 0 : normals.front().size(); }
  Eigen::MatrixXd normal_matrix() const;  ///< one facet per row
  Eigen::VectorXd bound_vector() const;
};

enum class Location { Inside, Boundary, Outside };
const char* to_string(Location loc);

struct MembershipResult {
  bool inside = false;
  /// Convex weights over the vertices when inside.
  Eigen::VectorXd weights;
  double residual = 0.0;
  /// When outside: every vertex satisfies normal . v <= offset while
  /// normal . q = offset + margin with margin > 0.
  Eigen::VectorXd separator_normal;
  double separator_offset = 0.0;
  double margin = 0.0;
};

/// Convex-combination test by linear programming.
MembershipResult member(const VertexPolytope& poly, const Eigen::VectorXd& q, double tol = 1e-9);

struct FacetReport {
  Eigen::VectorXd slacks;  ///< f_i . q - b_i
  Location location = Location::Inside;
  std::size_t most_violated = 0;
  double max_slack = 0.0;
};

/// Signed slacks; |slack| <= tol on the largest one is reported as Boundary.
FacetReport facet_check(const FacetSystem& fs, const Eigen::VectorXd& q, double tol = 1e-9);

/// Flags facets that coincide with a positivity condition (M p + V)_k >= 0.
void mark_trivial_facets(FacetSystem& fs, const AffineEmbedding& emb);

/// Non-disturbance test: every entry of M q + V is >= -tol.
bool nondisturbance_contains(const AffineEmbedding& emb, const Eigen::VectorXd& q, double tol = 1e-9);

/// Vertices of the noncontextuality polytope (32) and its 16 facets.
std::pair<VertexPolytope, FacetSystem> kcbs_nc_polytope();
/// All 48 vertices of the KCBS non-disturbance polytope; the first 32 are
/// the noncontextual ones.
VertexPolytope kcbs_nd_polytope();

}  // namespace contextua
