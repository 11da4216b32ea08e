#include "contextua/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "contextua/errors.hpp"
#include "contextua/kcbs_data.hpp"
#include "contextua/linprog.hpp"

namespace contextua {

VertexPolytope::VertexPolytope(std::vector<RationalVector> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.empty()) throw InvalidInput("polytope needs at least one vertex");
  dim_ = vertices_.front().size();
  std::set<RationalVector> seen;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].size() != dim_) throw InvalidInput("polytope vertices have mixed dimensions");
    if (!seen.insert(vertices_[i]).second)
      throw InvalidInput("polytope vertex " + std::to_string(i + 1) + " repeats an earlier vertex");
  }
  mat_.resize(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(vertices_.size()));
  for (std::size_t k = 0; k < vertices_.size(); ++k) mat_.col(static_cast<Eigen::Index>(k)) = to_eigen(vertices_[k]);
}

Eigen::MatrixXd FacetSystem::normal_matrix() const {
  Eigen::MatrixXd f(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(dimension()));
  for (std::size_t i = 0; i < size(); ++i) f.row(static_cast<Eigen::Index>(i)) = to_eigen(normals[i]).transpose();
  return f;
}

Eigen::VectorXd FacetSystem::bound_vector() const { return to_eigen(bounds); }

const char* to_string(Location loc) {
  switch (loc) {
    case Location::Inside: return "inside";
    case Location::Boundary: return "boundary";
    case Location::Outside: return "outside";
  }
  return "?";
}

MembershipResult member(const VertexPolytope& poly, const Eigen::VectorXd& q, double tol) {
  const auto d = static_cast<Eigen::Index>(poly.dimension());
  const auto k = static_cast<Eigen::Index>(poly.size());
  if (q.size() != d)
    throw InvalidInput("membership: point has " + std::to_string(q.size()) + " coordinates, polytope has " +
                       std::to_string(d));

  lp::LpProblem feas(static_cast<std::size_t>(k));
  feas.a_eq.resize(d + 1, k);
  feas.a_eq.topRows(d) = poly.matrix();
  feas.a_eq.row(d).setOnes();
  feas.b_eq.resize(d + 1);
  feas.b_eq.head(d) = q;
  feas.b_eq(d) = 1.0;
  lp::LpOptions opt;
  opt.tol = tol;
  const auto sol = lp::solve(feas, opt);

  MembershipResult out;
  if (sol.status == lp::LpStatus::Optimal) {
    out.inside = true;
    out.weights = sol.x;
    out.residual = sol.max_residual;
    return out;
  }

  // Separation: maximize h.q - t  s.t.  h.v_a <= t, -1 <= h <= 1.
  lp::LpProblem sep(static_cast<std::size_t>(d + 1));
  sep.sense = lp::LpProblem::Sense::Maximize;
  sep.objective.head(d) = q;
  sep.objective(d) = -1.0;
  sep.a_ub.resize(k, d + 1);
  sep.a_ub.leftCols(d) = poly.matrix().transpose();
  sep.a_ub.col(d).setConstant(-1.0);
  sep.b_ub = Eigen::VectorXd::Zero(k);
  sep.lower = Eigen::VectorXd::Constant(d + 1, -1.0);
  sep.upper = Eigen::VectorXd::Constant(d + 1, 1.0);
  sep.lower(d) = -lp::kInf;
  sep.upper(d) = lp::kInf;
  const auto cert = lp::solve(sep, opt);
  if (cert.status == lp::LpStatus::Optimal) {
    out.separator_normal = cert.x.head(d);
    out.separator_offset = cert.x(d);
    out.margin = cert.objective;
  }
  return out;
}

FacetReport facet_check(const FacetSystem& fs, const Eigen::VectorXd& q, double tol) {
  if (static_cast<std::size_t>(q.size()) != fs.dimension())
    throw InvalidInput("facet check: point has " + std::to_string(q.size()) + " coordinates, facets have " +
                       std::to_string(fs.dimension()));
  FacetReport rep;
  rep.slacks = fs.normal_matrix() * q - fs.bound_vector();
  Eigen::Index arg = 0;
  rep.max_slack = rep.slacks.maxCoeff(&arg);
  rep.most_violated = static_cast<std::size_t>(arg);
  if (rep.max_slack > tol) {
    rep.location = Location::Outside;
  } else if (rep.max_slack >= -tol) {
    rep.location = Location::Boundary;
  } else {
    rep.location = Location::Inside;
  }
  return rep;
}

void mark_trivial_facets(FacetSystem& fs, const AffineEmbedding& emb) {
  if (fs.dimension() != emb.indep_dim()) throw InvalidInput("facet system and embedding dimensions differ");
  fs.trivial.assign(fs.size(), false);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t r = 0; r < emb.full_dim(); ++r) {
      // (M p + V)_r >= 0  <=>  -M_r . p <= V_r ; compare up to a positive scale.
      std::size_t lead = 0;
      while (lead < emb.indep_dim() && emb.m()(r, lead) == 0) ++lead;
      if (lead == emb.indep_dim()) continue;
      if (fs.normals[i][lead] == 0) continue;
      const Rational scale = fs.normals[i][lead] / (-emb.m()(r, lead));
      if (scale <= 0) continue;
      bool same = fs.bounds[i] == scale * emb.v()[r];
      for (std::size_t c = 0; same && c < emb.indep_dim(); ++c)
        same = fs.normals[i][c] == -scale * emb.m()(r, c);
      if (same) {
        fs.trivial[i] = true;
        break;
      }
    }
  }
}

bool nondisturbance_contains(const AffineEmbedding& emb, const Eigen::VectorXd& q, double tol) {
  const auto full = embed(emb, IndepProbVector{q});
  return full.values.minCoeff() >= -tol;
}

std::pair<VertexPolytope, FacetSystem> kcbs_nc_polytope() {
  FacetSystem fs;
  fs.normals = kcbs::facet_normals();
  fs.bounds = kcbs::facet_bounds();
  mark_trivial_facets(fs, kcbs::embedding());
  return {VertexPolytope(kcbs::nc_vertices()), std::move(fs)};
}

VertexPolytope kcbs_nd_polytope() { return VertexPolytope(kcbs::nd_vertices()); }

}  // namespace contextua
