#include "contextua/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "contextua/errors.hpp"

namespace contextua {

namespace {

std::string join_indices(const std::vector<std::size_t>& v) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ']';
  return os.str();
}

// Incremental independence test for row vectors of fixed length.
class RowBasis {
 public:
  explicit RowBasis(std::size_t width) : width_(width) {}

  // Adds `row` if it is independent of the rows accepted so far.
  bool try_add(RationalVector row) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rational f = row[pivots_[i]];
      if (f == 0) continue;
      for (std::size_t j = 0; j < width_; ++j)
        if (rows_[i][j] != 0) row[j] -= f * rows_[i][j];
    }
    auto it = std::find_if(row.begin(), row.end(), [](const Rational& x) { return x != 0; });
    if (it == row.end()) return false;
    const auto p = static_cast<std::size_t>(it - row.begin());
    const Rational inv = 1 / row[p];
    for (auto& x : row) x *= inv;
    // Keep the stored rows reduced against the new pivot.
    for (auto& r : rows_) {
      const Rational f = r[p];
      if (f == 0) continue;
      for (std::size_t j = 0; j < width_; ++j)
        if (row[j] != 0) r[j] -= f * row[j];
    }
    rows_.push_back(std::move(row));
    pivots_.push_back(p);
    return true;
  }

  std::size_t size() const { return rows_.size(); }

 private:
  std::size_t width_;
  std::vector<RationalVector> rows_;
  std::vector<std::size_t> pivots_;
};

std::vector<std::size_t> round_robin_order(const MarginalScenario& s, bool trailing) {
  std::size_t max_m = 0;
  for (const auto& c : s.contexts()) max_m = std::max(max_m, c.outcome_count);
  std::vector<std::size_t> order;
  order.reserve(s.dimension());
  for (std::size_t pos = 0; pos < max_m; ++pos) {
    for (std::size_t ci = 0; ci < s.contexts().size(); ++ci) {
      const std::size_t m = s.contexts()[ci].outcome_count;
      if (pos >= m) continue;
      const std::size_t k = trailing ? m - 1 - pos : pos;
      order.push_back(s.context_offset(ci) + k);
    }
  }
  return order;
}

std::string outcome_label(const MarginalScenario& s, const std::vector<std::size_t>& obs,
                          const std::vector<std::size_t>& pos) {
  std::ostringstream os;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto& o = s.observables()[obs[i]];
    os << (i ? "," : "") << o.id << '=' << o.outcomes[pos[i]];
  }
  return os.str();
}

}  // namespace

MarginalScenario::MarginalScenario(std::vector<Observable> observables,
                                   const std::vector<std::vector<std::string>>& contexts)
    : observables_(std::move(observables)) {
  if (observables_.empty()) throw InvalidInput("scenario has no observables");
  std::set<std::string> ids;
  for (const auto& o : observables_) {
    if (o.id.empty()) throw InvalidInput("observable with empty id");
    if (!ids.insert(o.id).second) throw InvalidInput("duplicate observable id '" + o.id + "'");
    if (o.outcomes.empty()) throw InvalidInput("observable '" + o.id + "' has no outcomes");
    std::set<int> seen(o.outcomes.begin(), o.outcomes.end());
    if (seen.size() != o.outcomes.size())
      throw InvalidInput("observable '" + o.id + "' lists an outcome twice");
  }
  if (contexts.empty()) throw InvalidInput("scenario has no contexts");

  std::vector<bool> covered(observables_.size(), false);
  for (std::size_t ci = 0; ci < contexts.size(); ++ci) {
    Context ctx;
    ctx.members = contexts[ci];
    if (ctx.members.empty()) throw InvalidInput("context " + std::to_string(ci + 1) + " is empty");
    std::set<std::string> seen;
    ctx.outcome_count = 1;
    for (const auto& id : ctx.members) {
      if (!seen.insert(id).second)
        throw InvalidInput("context " + std::to_string(ci + 1) + " repeats observable '" + id + "'");
      const std::size_t idx = observable_index(id);
      ctx.observable_indices.push_back(idx);
      ctx.outcome_count *= observables_[idx].outcomes.size();
      covered[idx] = true;
    }
    offsets_.push_back(dimension_);
    dimension_ += ctx.outcome_count;
    contexts_.push_back(std::move(ctx));
  }
  for (std::size_t i = 0; i < observables_.size(); ++i) {
    if (!covered[i])
      throw InvalidInput("observable '" + observables_[i].id + "' belongs to no context");
  }
}

std::size_t MarginalScenario::observable_index(const std::string& id) const {
  for (std::size_t i = 0; i < observables_.size(); ++i)
    if (observables_[i].id == id) return i;
  throw InvalidInput("unknown observable '" + id + "'");
}

std::vector<std::size_t> MarginalScenario::joint_outcome(std::size_t ctx, std::size_t k) const {
  const auto& c = contexts_.at(ctx);
  if (k >= c.outcome_count) throw InvalidInput("joint outcome index out of range");
  std::vector<std::size_t> pos(c.members.size());
  for (std::size_t i = c.members.size(); i-- > 0;) {
    const std::size_t card = observables_[c.observable_indices[i]].outcomes.size();
    pos[i] = k % card;
    k /= card;
  }
  return pos;
}

std::size_t MarginalScenario::joint_index(std::size_t ctx,
                                          const std::vector<std::size_t>& outcome_positions) const {
  const auto& c = contexts_.at(ctx);
  if (outcome_positions.size() != c.members.size())
    throw InvalidInput("joint outcome has wrong arity");
  std::size_t k = 0;
  for (std::size_t i = 0; i < c.members.size(); ++i) {
    const std::size_t card = observables_[c.observable_indices[i]].outcomes.size();
    if (outcome_positions[i] >= card) throw InvalidInput("outcome position out of range");
    k = k * card + outcome_positions[i];
  }
  return k;
}

std::size_t MarginalScenario::assignment_count() const {
  std::size_t k = 1;
  for (const auto& o : observables_) k *= o.outcomes.size();
  return k;
}

std::vector<ConsistencyConstraint> consistency_constraints(const MarginalScenario& s) {
  const std::size_t n = s.dimension();
  const auto& ctxs = s.contexts();
  std::vector<ConsistencyConstraint> out;

  for (std::size_t ci = 0; ci < ctxs.size(); ++ci) {
    ConsistencyConstraint row{ConsistencyConstraint::Kind::Normalization,
                              "normalization ctx" + std::to_string(ci + 1),
                              RationalVector(n, Rational(0)), Rational(1)};
    for (std::size_t k = 0; k < ctxs[ci].outcome_count; ++k) row.coeffs[s.context_offset(ci) + k] = 1;
    out.push_back(std::move(row));
  }

  for (std::size_t ci = 0; ci < ctxs.size(); ++ci) {
    for (std::size_t cj = ci + 1; cj < ctxs.size(); ++cj) {
      // Shared observables, in scenario order.
      std::vector<std::size_t> shared;
      for (std::size_t o = 0; o < s.observables().size(); ++o) {
        const auto& a = ctxs[ci].observable_indices;
        const auto& b = ctxs[cj].observable_indices;
        if (std::find(a.begin(), a.end(), o) != a.end() && std::find(b.begin(), b.end(), o) != b.end())
          shared.push_back(o);
      }
      if (shared.empty()) continue;

      std::size_t shared_count = 1;
      for (auto o : shared) shared_count *= s.observables()[o].outcomes.size();

      auto restrict_to_shared = [&](std::size_t ctx, std::size_t k) {
        const auto pos = s.joint_outcome(ctx, k);
        const auto& members = ctxs[ctx].observable_indices;
        std::size_t key = 0;
        for (auto o : shared) {
          const auto at = static_cast<std::size_t>(std::find(members.begin(), members.end(), o) - members.begin());
          key = key * s.observables()[o].outcomes.size() + pos[at];
        }
        return key;
      };

      for (std::size_t key = 0; key < shared_count; ++key) {
        std::vector<std::size_t> shared_pos(shared.size());
        std::size_t rem = key;
        for (std::size_t i = shared.size(); i-- > 0;) {
          const std::size_t card = s.observables()[shared[i]].outcomes.size();
          shared_pos[i] = rem % card;
          rem /= card;
        }
        ConsistencyConstraint row{ConsistencyConstraint::Kind::Marginalization,
                                  "marginal ctx" + std::to_string(ci + 1) + "~ctx" + std::to_string(cj + 1) +
                                      " [" + outcome_label(s, shared, shared_pos) + "]",
                                  RationalVector(n, Rational(0)), Rational(0)};
        for (std::size_t k = 0; k < ctxs[ci].outcome_count; ++k)
          if (restrict_to_shared(ci, k) == key) row.coeffs[s.context_offset(ci) + k] += 1;
        for (std::size_t k = 0; k < ctxs[cj].outcome_count; ++k)
          if (restrict_to_shared(cj, k) == key) row.coeffs[s.context_offset(cj) + k] -= 1;
        out.push_back(std::move(row));
      }
    }
  }
  return out;
}

AffineEmbedding::AffineEmbedding(RationalMatrix m, RationalVector v, std::vector<std::size_t> selected)
    : m_(std::move(m)), v_(std::move(v)), selected_(std::move(selected)) {
  if (v_.size() != m_.rows()) throw InvalidInput("embedding: V length differs from rows of M");
  if (selected_.size() != m_.cols()) throw InvalidInput("embedding: T must have one row per column of M");
  for (auto c : selected_)
    if (c >= m_.rows()) throw InvalidInput("embedding: T selects a coordinate out of range");
  m_d_ = m_.to_eigen();
  v_d_ = to_eigen(v_);
}

RationalMatrix AffineEmbedding::t() const {
  RationalMatrix t(selected_.size(), m_.rows());
  for (std::size_t r = 0; r < selected_.size(); ++r) t(r, selected_[r]) = 1;
  return t;
}

Eigen::MatrixXd AffineEmbedding::t_double() const { return t().to_eigen(); }

RationalVector AffineEmbedding::embed_exact(const RationalVector& p) const {
  if (p.size() != indep_dim()) throw InvalidInput("embed: expected " + std::to_string(indep_dim()) + " coordinates");
  return m_ * p + v_;
}

RationalVector AffineEmbedding::project_exact(const RationalVector& full) const {
  if (full.size() != full_dim()) throw InvalidInput("project: expected " + std::to_string(full_dim()) + " coordinates");
  RationalVector p(selected_.size());
  for (std::size_t r = 0; r < selected_.size(); ++r) p[r] = full[selected_[r]];
  return p;
}

AffineEmbedding derive_embedding(const MarginalScenario& scenario, const IndexPolicy& policy) {
  const auto rows = consistency_constraints(scenario);
  const std::size_t n = scenario.dimension();
  RationalMatrix a(rows.size(), n);
  RationalVector d(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < n; ++c) a(r, c) = rows[r].coeffs[c];
    d[r] = rows[r].rhs;
  }
  const auto ech = row_reduce(a, d);
  if (!ech.consistent) {
    throw InvalidInput("constraint system is inconsistent: rank(A) = " + std::to_string(ech.rank()) +
                       " < rank([A|b]) = " + std::to_string(ech.rank() + 1));
  }
  const std::size_t ell = n - ech.rank();

  const auto ns = null_space(a);
  const RationalMatrix& kernel = ns.basis;  // n x ell
  RationalVector particular(n, Rational(0));
  for (std::size_t i = 0; i < ech.rank(); ++i) particular[ech.pivots[i]] = ech.rhs[i];

  auto greedy = [&](const std::vector<std::size_t>& order) {
    RowBasis basis(ell);
    std::vector<std::size_t> chosen;
    for (auto idx : order) {
      if (chosen.size() == ell) break;
      if (basis.try_add(kernel.row(idx))) chosen.push_back(idx);
    }
    return chosen;
  };

  std::vector<std::size_t> selected;
  switch (policy.kind) {
    case IndexPolicy::Kind::Leading:
      selected = greedy(round_robin_order(scenario, false));
      std::sort(selected.begin(), selected.end());
      break;
    case IndexPolicy::Kind::Trailing:
      selected = greedy(round_robin_order(scenario, true));
      std::sort(selected.begin(), selected.end());
      break;
    case IndexPolicy::Kind::Explicit: {
      RowBasis basis(ell);
      for (auto idx : policy.indices) {
        if (idx >= n) throw InvalidInput("index policy: coordinate " + std::to_string(idx) + " out of range");
        if (!basis.try_add(kernel.row(idx))) {
          // Complete the valid prefix greedily to suggest an alternative.
          std::vector<std::size_t> order(selected);
          for (auto o : round_robin_order(scenario, false))
            if (std::find(order.begin(), order.end(), o) == order.end()) order.push_back(o);
          throw InvalidInput("index policy: coordinate " + std::to_string(idx) +
                             " is determined by the coordinates chosen before it; a valid selection is " +
                             join_indices(greedy(order)));
        }
        selected.push_back(idx);
      }
      if (selected.size() != ell) {
        throw InvalidInput("index policy: need " + std::to_string(ell) + " independent coordinates, got " +
                           std::to_string(selected.size()) + "; a valid selection is " +
                           join_indices(greedy(round_robin_order(scenario, false))));
      }
      break;
    }
  }
  if (selected.size() != ell) throw InvalidInput("could not select independent coordinates");

  RationalMatrix k_sel(ell, ell);
  RationalVector p0_sel(ell);
  for (std::size_t r = 0; r < ell; ++r) {
    for (std::size_t c = 0; c < ell; ++c) k_sel(r, c) = kernel(selected[r], c);
    p0_sel[r] = particular[selected[r]];
  }
  const RationalMatrix m = kernel * inverse(k_sel);
  const RationalVector v = particular - m * p0_sel;
  return AffineEmbedding(m, v, selected);
}

FullProbVector embed(const AffineEmbedding& emb, const IndepProbVector& p) {
  if (static_cast<std::size_t>(p.values.size()) != emb.indep_dim())
    throw InvalidInput("embed: expected " + std::to_string(emb.indep_dim()) + " coordinates, got " +
                       std::to_string(p.values.size()));
  return {emb.m_double() * p.values + emb.v_double()};
}

IndepProbVector project(const AffineEmbedding& emb, const FullProbVector& full) {
  if (static_cast<std::size_t>(full.values.size()) != emb.full_dim())
    throw InvalidInput("project: expected " + std::to_string(emb.full_dim()) + " coordinates, got " +
                       std::to_string(full.values.size()));
  Eigen::VectorXd p(static_cast<Eigen::Index>(emb.indep_dim()));
  for (std::size_t r = 0; r < emb.indep_dim(); ++r)
    p(static_cast<Eigen::Index>(r)) = full.values(static_cast<Eigen::Index>(emb.selected()[r]));
  return {p};
}

DeterministicVertices deterministic_vertices(const MarginalScenario& s, const AffineEmbedding& emb) {
  if (emb.full_dim() != s.dimension()) throw InvalidInput("embedding does not match scenario dimension");
  DeterministicVertices out;
  const std::size_t g = s.observables().size();
  const std::size_t kappa = s.assignment_count();
  std::set<RationalVector> seen;
  for (std::size_t a = 0; a < kappa; ++a) {
    std::vector<std::size_t> pos(g);
    std::size_t rem = a;
    for (std::size_t i = g; i-- > 0;) {
      const std::size_t card = s.observables()[i].outcomes.size();
      pos[i] = rem % card;
      rem /= card;
    }
    RationalVector full(s.dimension(), Rational(0));
    for (std::size_t ci = 0; ci < s.contexts().size(); ++ci) {
      const auto& members = s.contexts()[ci].observable_indices;
      std::vector<std::size_t> local(members.size());
      for (std::size_t m = 0; m < members.size(); ++m) local[m] = pos[members[m]];
      full[s.context_offset(ci) + s.joint_index(ci, local)] = 1;
    }
    auto proj = emb.project_exact(full);
    if (seen.insert(proj).second) out.distinct.push_back(proj);
    out.assignments.push_back(std::move(pos));
    out.full.push_back(std::move(full));
    out.projected.push_back(std::move(proj));
  }
  return out;
}

bool ValidationReport::ok() const { return !first_failure().has_value(); }

std::optional<std::string> ValidationReport::first_failure() const {
  for (const auto* group : {&bounds, &normalization, &marginalization})
    for (const auto& c : *group)
      if (!c.passed) return c.label;
  return std::nullopt;
}

ValidationReport validate_model(const MarginalScenario& s, const FullProbVector& full, double tol) {
  if (static_cast<std::size_t>(full.values.size()) != s.dimension())
    throw InvalidInput("validate_model: expected " + std::to_string(s.dimension()) + " entries, got " +
                       std::to_string(full.values.size()));
  ValidationReport rep;
  for (Eigen::Index i = 0; i < full.values.size(); ++i) {
    const double x = full.values(i);
    const double r = std::max({0.0, -x, x - 1.0});
    rep.bounds.push_back({"entry " + std::to_string(i + 1) + " in [0,1]", r, r <= tol});
    rep.max_residual = std::max(rep.max_residual, r);
  }
  for (const auto& row : consistency_constraints(s)) {
    double lhs = 0.0;
    for (std::size_t c = 0; c < row.coeffs.size(); ++c)
      if (row.coeffs[c] != 0) lhs += to_double(row.coeffs[c]) * full.values(static_cast<Eigen::Index>(c));
    const double r = std::abs(lhs - to_double(row.rhs));
    ConstraintCheck chk{row.label, r, r <= tol};
    rep.max_residual = std::max(rep.max_residual, r);
    if (row.kind == ConsistencyConstraint::Kind::Normalization) {
      rep.normalization.push_back(std::move(chk));
    } else {
      rep.marginalization.push_back(std::move(chk));
    }
  }
  return rep;
}

}  // namespace contextua
