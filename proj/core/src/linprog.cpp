#include "contextua/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "contextua/errors.hpp"

namespace contextua::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;

// How an original variable maps onto nonnegative standard-form columns.
struct VarMap {
  enum class Kind { Shifted, Mirrored, Split } kind = Kind::Shifted;
  double offset = 0.0;  // lower bound (Shifted) or upper bound (Mirrored)
  Eigen::Index col = 0;
  Eigen::Index col_neg = -1;  // second column for free variables
};

// Standard form: min c.z  s.t.  A z = b, z >= 0, b >= 0.
struct StandardForm {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  std::vector<Eigen::Index> slack_basis;  // per row: slack column usable as initial basis, or -1
  std::vector<VarMap> vars;
  double objective_offset = 0.0;
};

StandardForm to_standard_form(const LpProblem& p) {
  const auto n = static_cast<Eigen::Index>(p.num_vars());
  const Eigen::VectorXd lower = p.lower.size() ? p.lower : Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd upper = p.upper.size() ? p.upper : Eigen::VectorXd::Constant(n, kInf);
  const double sign = p.sense == LpProblem::Sense::Maximize ? -1.0 : 1.0;

  StandardForm sf;
  Eigen::Index cols = 0;
  std::vector<Eigen::Index> bounded;  // variables needing an explicit upper-bound row
  for (Eigen::Index j = 0; j < n; ++j) {
    VarMap vm;
    if (std::isfinite(lower(j))) {
      vm.kind = VarMap::Kind::Shifted;
      vm.offset = lower(j);
      vm.col = cols++;
      if (std::isfinite(upper(j))) bounded.push_back(j);
    } else if (std::isfinite(upper(j))) {
      vm.kind = VarMap::Kind::Mirrored;
      vm.offset = upper(j);
      vm.col = cols++;
    } else {
      vm.kind = VarMap::Kind::Split;
      vm.col = cols++;
      vm.col_neg = cols++;
    }
    sf.vars.push_back(vm);
  }
  const Eigen::Index n_struct = cols;
  const Eigen::Index m_eq = p.a_eq.rows();
  const Eigen::Index m_ub = p.a_ub.rows() + static_cast<Eigen::Index>(bounded.size());
  const Eigen::Index m = m_eq + m_ub;
  const Eigen::Index total = n_struct + m_ub;

  sf.a = Eigen::MatrixXd::Zero(m, total);
  sf.b = Eigen::VectorXd::Zero(m);
  sf.c = Eigen::VectorXd::Zero(total);
  sf.slack_basis.assign(static_cast<std::size_t>(m), -1);

  // Writes row `src` of an original constraint matrix into standard row `r`,
  // returning the rhs correction from the variable shifts.
  auto put_row = [&](Eigen::Index r, const Eigen::MatrixXd& mat, Eigen::Index src) {
    double shift = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = mat(src, j);
      if (v == 0.0) continue;
      const auto& vm = sf.vars[static_cast<std::size_t>(j)];
      switch (vm.kind) {
        case VarMap::Kind::Shifted:
          sf.a(r, vm.col) += v;
          shift += v * vm.offset;
          break;
        case VarMap::Kind::Mirrored:
          sf.a(r, vm.col) -= v;
          shift += v * vm.offset;
          break;
        case VarMap::Kind::Split:
          sf.a(r, vm.col) += v;
          sf.a(r, vm.col_neg) -= v;
          break;
      }
    }
    return shift;
  };

  for (Eigen::Index i = 0; i < m_eq; ++i) sf.b(i) = p.b_eq(i) - put_row(i, p.a_eq, i);
  for (Eigen::Index i = 0; i < p.a_ub.rows(); ++i) {
    const Eigen::Index r = m_eq + i;
    sf.b(r) = p.b_ub(i) - put_row(r, p.a_ub, i);
    sf.a(r, n_struct + i) = 1.0;
    sf.slack_basis[static_cast<std::size_t>(r)] = n_struct + i;
  }
  for (std::size_t k = 0; k < bounded.size(); ++k) {
    const Eigen::Index j = bounded[k];
    const Eigen::Index r = m_eq + p.a_ub.rows() + static_cast<Eigen::Index>(k);
    const Eigen::Index s = n_struct + p.a_ub.rows() + static_cast<Eigen::Index>(k);
    sf.a(r, sf.vars[static_cast<std::size_t>(j)].col) = 1.0;
    sf.a(r, s) = 1.0;
    sf.b(r) = upper(j) - lower(j);
    sf.slack_basis[static_cast<std::size_t>(r)] = s;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (sf.b(i) < 0.0) {
      sf.a.row(i) *= -1.0;
      sf.b(i) = -sf.b(i);
      sf.slack_basis[static_cast<std::size_t>(i)] = -1;
    }
  }

  for (Eigen::Index j = 0; j < n; ++j) {
    const double cj = sign * p.objective(j);
    const auto& vm = sf.vars[static_cast<std::size_t>(j)];
    switch (vm.kind) {
      case VarMap::Kind::Shifted:
        sf.c(vm.col) = cj;
        sf.objective_offset += cj * vm.offset;
        break;
      case VarMap::Kind::Mirrored:
        sf.c(vm.col) = -cj;
        sf.objective_offset += cj * vm.offset;
        break;
      case VarMap::Kind::Split:
        sf.c(vm.col) = cj;
        sf.c(vm.col_neg) = -cj;
        break;
    }
  }
  return sf;
}

// Dense tableau: rows 0..m-1 are constraints, row m holds reduced costs.
// The last column holds the basic values (row m: minus the objective).
class Tableau {
 public:
  Tableau(const StandardForm& sf, const LpOptions& opt) : opt_(opt) {
    m_ = sf.a.rows();
    n_ = sf.a.cols();
    // Artificial columns only for rows without a usable slack.
    for (Eigen::Index i = 0; i < m_; ++i)
      if (sf.slack_basis[static_cast<std::size_t>(i)] < 0) art_rows_.push_back(i);
    width_ = n_ + static_cast<Eigen::Index>(art_rows_.size());
    t_ = Eigen::MatrixXd::Zero(m_ + 1, width_ + 1);
    t_.block(0, 0, m_, n_) = sf.a;
    t_.block(0, width_, m_, 1) = sf.b;
    basis_.assign(static_cast<std::size_t>(m_), -1);
    for (Eigen::Index i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = sf.slack_basis[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < art_rows_.size(); ++k) {
      const Eigen::Index col = n_ + static_cast<Eigen::Index>(k);
      t_(art_rows_[k], col) = 1.0;
      basis_[static_cast<std::size_t>(art_rows_[k])] = col;
    }
  }

  Eigen::Index rows() const { return m_; }
  Eigen::Index structural() const { return n_; }
  const std::vector<Eigen::Index>& basis() const { return basis_; }
  std::size_t iterations() const { return iterations_; }
  bool is_artificial(Eigen::Index col) const { return col >= n_; }

  // Loads `cost` (length width) into the reduced-cost row.
  void set_costs(const Eigen::VectorXd& cost) {
    t_.row(m_).setZero();
    t_.row(m_).head(width_) = cost.transpose();
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index bcol = basis_[static_cast<std::size_t>(i)];
      const double cb = cost(bcol);
      if (cb != 0.0) t_.row(m_) -= cb * t_.row(i);
    }
  }

  double objective() const { return -t_(m_, width_); }

  enum class Outcome { Optimal, Unbounded };

  Outcome run(bool allow_artificial, const char* phase) {
    bool bland = false;
    std::size_t degenerate = 0;
    for (;;) {
      if (iterations_ >= opt_.max_iterations)
        throw SolverFailure("simplex: iteration guard of " + std::to_string(opt_.max_iterations) +
                            " pivots exceeded");
      Eigen::Index enter = -1;
      double best = -kCostTol;
      const Eigen::Index limit = allow_artificial ? width_ : n_;
      for (Eigen::Index j = 0; j < limit; ++j) {
        const double rc = t_(m_, j);
        if (rc < best) {
          enter = j;
          if (bland) break;
          best = rc;
        }
      }
      if (enter < 0) return Outcome::Optimal;

      Eigen::Index leave = -1;
      double ratio = kInf;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double a = t_(i, enter);
        if (a <= kPivotTol) continue;
        const double r = t_(i, width_) / a;
        if (leave < 0 || r < ratio - 1e-12) {
          leave = i;
          ratio = r;
        } else if (r <= ratio + 1e-12) {
          const bool take = bland ? basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]
                                  : a > t_(leave, enter);
          if (take) {
            leave = i;
            ratio = std::min(ratio, r);
          }
        }
      }
      if (leave < 0) return Outcome::Unbounded;

      if (ratio <= 1e-12) {
        if (++degenerate >= opt_.degenerate_switch) bland = true;
      } else {
        degenerate = 0;
      }
      if (opt_.trace) {
        *opt_.trace << phase << " it=" << iterations_ << " enter=" << enter << " leave_row=" << leave
                    << " ratio=" << ratio << " obj=" << objective() << (bland ? " [bland]" : "") << '\n';
      }
      pivot(leave, enter);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t_.row(r) /= t_(r, c);
    for (Eigen::Index i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    t_(r, c) = 1.0;
    basis_[static_cast<std::size_t>(r)] = c;
    ++iterations_;
  }

  // After phase 1: pivot basic artificials out, or drop their (redundant) rows.
  void expel_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[static_cast<std::size_t>(i)])) continue;
      Eigen::Index col = -1;
      double best = 1e-9;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (std::abs(t_(i, j)) > best) {
          best = std::abs(t_(i, j));
          col = j;
        }
      }
      if (col >= 0) {
        pivot(i, col);
      } else {
        redundant_.push_back(i);
      }
    }
  }

  bool row_redundant(Eigen::Index i) const {
    return std::find(redundant_.begin(), redundant_.end(), i) != redundant_.end();
  }

  double value(Eigen::Index row) const { return t_(row, width_); }
  Eigen::Index width() const { return width_; }

 private:
  LpOptions opt_;
  Eigen::Index m_ = 0, n_ = 0, width_ = 0;
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
  std::vector<Eigen::Index> art_rows_;
  std::vector<Eigen::Index> redundant_;
  std::size_t iterations_ = 0;
};

double residual(const LpProblem& p, const Eigen::VectorXd& x) {
  const auto n = static_cast<Eigen::Index>(p.num_vars());
  double r = 0.0;
  if (p.a_eq.rows()) r = std::max(r, (p.a_eq * x - p.b_eq).cwiseAbs().maxCoeff());
  if (p.a_ub.rows()) r = std::max(r, (p.a_ub * x - p.b_ub).cwiseMax(0.0).maxCoeff());
  for (Eigen::Index j = 0; j < n; ++j) {
    if (p.lower.size() == 0) {
      r = std::max(r, -x(j));
    } else if (std::isfinite(p.lower(j))) {
      r = std::max(r, p.lower(j) - x(j));
    }
    if (p.upper.size() && std::isfinite(p.upper(j))) r = std::max(r, x(j) - p.upper(j));
  }
  return r;
}

}  // namespace

LpProblem::LpProblem(std::size_t num_vars)
    : objective(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_vars))),
      a_eq(0, static_cast<Eigen::Index>(num_vars)),
      a_ub(0, static_cast<Eigen::Index>(num_vars)) {}

void LpProblem::validate() const {
  const auto n = objective.size();
  if (a_eq.rows() && a_eq.cols() != n) throw InvalidInput("LP: equality matrix has wrong column count");
  if (a_eq.rows() != b_eq.size()) throw InvalidInput("LP: equality rhs length mismatch");
  if (a_ub.rows() && a_ub.cols() != n) throw InvalidInput("LP: inequality matrix has wrong column count");
  if (a_ub.rows() != b_ub.size()) throw InvalidInput("LP: inequality rhs length mismatch");
  if (lower.size() && lower.size() != n) throw InvalidInput("LP: lower bound length mismatch");
  if (upper.size() && upper.size() != n) throw InvalidInput("LP: upper bound length mismatch");
  for (Eigen::Index j = 0; j < n; ++j) {
    const double lo = lower.size() ? lower(j) : 0.0;
    const double hi = upper.size() ? upper(j) : kInf;
    if (lo > hi) throw InvalidInput("LP: lower bound exceeds upper bound for variable " + std::to_string(j));
    if (std::isnan(lo) || std::isnan(hi)) throw InvalidInput("LP: NaN bound");
  }
  if (!objective.allFinite() || !a_eq.allFinite() || !b_eq.allFinite() || !a_ub.allFinite() || !b_ub.allFinite())
    throw InvalidInput("LP: non-finite coefficient");
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

LpSolution solve(const LpProblem& problem, const LpOptions& options) {
  problem.validate();
  const StandardForm sf = to_standard_form(problem);
  Tableau tab(sf, options);

  LpSolution sol;
  // Phase 1: minimize the sum of artificials.
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(tab.width());
  phase1.tail(tab.width() - tab.structural()).setOnes();
  tab.set_costs(phase1);
  tab.run(true, "phase1");
  if (tab.objective() > options.tol) {
    sol.status = LpStatus::Infeasible;
    sol.iterations = tab.iterations();
    return sol;
  }
  tab.expel_artificials();

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(tab.width());
  phase2.head(tab.structural()) = sf.c;
  tab.set_costs(phase2);
  const auto outcome = tab.run(false, "phase2");
  sol.iterations = tab.iterations();
  if (outcome == Tableau::Outcome::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  // Recompute the basic solution from the original data to shed pivoting
  // round-off.
  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index i = 0; i < tab.rows(); ++i) {
    if (tab.row_redundant(i)) continue;
    rows.push_back(i);
    cols.push_back(tab.basis()[static_cast<std::size_t>(i)]);
  }
  Eigen::VectorXd z = Eigen::VectorXd::Zero(sf.a.cols());
  if (!rows.empty()) {
    const auto k = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd basis(k, k);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index r = 0; r < k; ++r) {
      rhs(r) = sf.b(rows[static_cast<std::size_t>(r)]);
      for (Eigen::Index c = 0; c < k; ++c) basis(r, c) = sf.a(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    Eigen::VectorXd zb;
    if (lu.isInvertible()) {
      zb = lu.solve(rhs);
    } else {
      zb.resize(k);
      for (Eigen::Index r = 0; r < k; ++r) zb(r) = tab.value(rows[static_cast<std::size_t>(r)]);
    }
    for (Eigen::Index r = 0; r < k; ++r) z(cols[static_cast<std::size_t>(r)]) = std::max(0.0, zb(r));
  }

  const auto n = static_cast<Eigen::Index>(problem.num_vars());
  sol.x.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& vm = sf.vars[static_cast<std::size_t>(j)];
    switch (vm.kind) {
      case VarMap::Kind::Shifted: sol.x(j) = vm.offset + z(vm.col); break;
      case VarMap::Kind::Mirrored: sol.x(j) = vm.offset - z(vm.col); break;
      case VarMap::Kind::Split: sol.x(j) = z(vm.col) - z(vm.col_neg); break;
    }
  }
  sol.status = LpStatus::Optimal;
  sol.objective = problem.objective.dot(sol.x);
  sol.max_residual = residual(problem, sol.x);
  return sol;
}

}  // namespace contextua::lp
