#include "contextua/imm.hpp"

#include <algorithm>
#include <cmath>

#include "contextua/errors.hpp"
#include "contextua/kcbs_data.hpp"
#include "contextua/linprog.hpp"

namespace contextua {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

/// Row and column of each flat entry inside the full n x n matrix.
struct EntryMap {
  std::vector<std::size_t> row, col;
};

EntryMap entry_map(const std::vector<std::size_t>& sizes) {
  EntryMap m;
  std::size_t off = 0;
  for (auto s : sizes) {
    for (std::size_t j = 0; j < s; ++j)
      for (std::size_t k = 0; k < s; ++k) {
        m.row.push_back(off + j);
        m.col.push_back(off + k);
      }
    off += s;
  }
  return m;
}

std::vector<std::size_t> context_sizes(const MarginalScenario& scenario) {
  std::vector<std::size_t> sizes;
  for (const auto& c : scenario.contexts()) sizes.push_back(c.outcome_count);
  return sizes;
}

RationalMatrix dense_exact(const ExactBlocks& w) {
  std::size_t n = 0;
  for (const auto& b : w) n += b.rows();
  RationalMatrix d(n, n);
  std::size_t off = 0;
  for (const auto& b : w) {
    if (b.rows() != b.cols()) throw InvalidInput("IMM block is not square");
    for (std::size_t r = 0; r < b.rows(); ++r)
      for (std::size_t c = 0; c < b.cols(); ++c) d(off + r, off + c) = b(r, c);
    off += b.rows();
  }
  return d;
}

/// Incremental exact row basis: keeps a row only if it is independent of the
/// rows kept so far.
class RowBasis {
 public:
  explicit RowBasis(std::size_t cols) : cols_(cols) {}

  bool add(RationalVector row) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rational f = row[pivots_[i]];
      if (f == 0) continue;
      for (std::size_t c = 0; c < cols_; ++c)
        if (rows_[i][c] != 0) row[c] -= f * rows_[i][c];
    }
    std::size_t p = 0;
    while (p < cols_ && row[p] == 0) ++p;
    if (p == cols_) return false;
    const Rational lead = row[p];
    for (auto& x : row) x /= lead;
    for (auto& r : rows_) {
      const Rational f = r[p];
      if (f == 0) continue;
      for (std::size_t c = 0; c < cols_; ++c)
        if (row[c] != 0) r[c] -= f * row[c];
    }
    rows_.push_back(std::move(row));
    pivots_.push_back(p);
    return true;
  }

 private:
  std::size_t cols_;
  std::vector<RationalVector> rows_;
  std::vector<std::size_t> pivots_;
};

ImmLinearSystem column_sum_system(const std::vector<std::size_t>& sizes) {
  ImmLinearSystem sys;
  sys.block_sizes = sizes;
  std::size_t entries = 0, cols = 0;
  for (auto s : sizes) {
    entries += s * s;
    cols += s;
  }
  sys.a = RationalMatrix(cols, entries);
  sys.b.assign(cols, Rational(1));
  std::size_t entry_off = 0, row = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const auto s = sizes[i];
    for (std::size_t k = 0; k < s; ++k, ++row) {
      for (std::size_t j = 0; j < s; ++j) sys.a(row, entry_off + j * s + k) = 1;
      sys.labels.push_back("column sum ctx" + std::to_string(i + 1) + " col" + std::to_string(k + 1));
    }
    entry_off += s * s;
  }
  return sys;
}

RationalMatrix append_rows(const RationalMatrix& a, const std::vector<RationalVector>& extra) {
  RationalMatrix out(a.rows() + extra.size(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
  for (std::size_t r = 0; r < extra.size(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(a.rows() + r, c) = extra[r][c];
  return out;
}

}  // namespace

// ---------------------------------------------------------------- Imm

Imm::Imm(std::vector<Eigen::MatrixXd> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw InvalidInput("IMM needs at least one block");
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    if (b.rows() == 0 || b.rows() != b.cols())
      throw InvalidInput("IMM block " + std::to_string(i + 1) + " is " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ", expected a non-empty square block");
    dim_ += static_cast<std::size_t>(b.rows());
  }
}

Imm Imm::identity(const std::vector<std::size_t>& block_sizes) {
  std::vector<Eigen::MatrixXd> blocks;
  for (auto s : block_sizes) blocks.push_back(Eigen::MatrixXd::Identity(idx(s), idx(s)));
  return Imm(std::move(blocks));
}

Imm Imm::identity(const MarginalScenario& scenario) { return identity(context_sizes(scenario)); }

Imm Imm::from_exact(const std::vector<RationalMatrix>& blocks) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& b : blocks) out.push_back(b.to_eigen());
  return Imm(std::move(out));
}

Imm Imm::from_flat(const Eigen::VectorXd& entries, const std::vector<std::size_t>& block_sizes) {
  std::size_t need = 0;
  for (auto s : block_sizes) need += s * s;
  if (static_cast<std::size_t>(entries.size()) != need)
    throw InvalidInput("IMM entry vector has " + std::to_string(entries.size()) + " entries, block sizes need " +
                       std::to_string(need));
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::Index off = 0;
  for (auto s : block_sizes) {
    Eigen::MatrixXd b(idx(s), idx(s));
    for (Eigen::Index j = 0; j < idx(s); ++j)
      for (Eigen::Index k = 0; k < idx(s); ++k) b(j, k) = entries(off++);
    blocks.push_back(std::move(b));
  }
  return Imm(std::move(blocks));
}

std::vector<std::size_t> Imm::block_sizes() const {
  std::vector<std::size_t> s;
  for (const auto& b : blocks_) s.push_back(static_cast<std::size_t>(b.rows()));
  return s;
}

std::size_t Imm::entry_count() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += static_cast<std::size_t>(b.size());
  return n;
}

Eigen::MatrixXd Imm::dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(idx(dim_), idx(dim_));
  Eigen::Index off = 0;
  for (const auto& b : blocks_) {
    d.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return d;
}

Eigen::VectorXd Imm::flat() const {
  Eigen::VectorXd w(idx(entry_count()));
  Eigen::Index i = 0;
  for (const auto& b : blocks_)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      for (Eigen::Index k = 0; k < b.cols(); ++k) w(i++) = b(j, k);
  return w;
}

double Imm::distance_to_identity() const {
  double s = 0.0;
  for (const auto& b : blocks_) s += (b - Eigen::MatrixXd::Identity(b.rows(), b.cols())).squaredNorm();
  return std::sqrt(s);
}

double Imm::stochasticity_residual() const {
  double r = 0.0;
  for (const auto& b : blocks_) {
    r = std::max(r, -b.minCoeff());
    r = std::max(r, (b.colwise().sum().array() - 1.0).abs().maxCoeff());
  }
  return r;
}

RationalVector flatten(const ExactBlocks& blocks) {
  RationalVector w;
  for (const auto& b : blocks)
    for (std::size_t j = 0; j < b.rows(); ++j)
      for (std::size_t k = 0; k < b.cols(); ++k) w.push_back(b(j, k));
  return w;
}

ExactBlocks identity_blocks(const std::vector<std::size_t>& block_sizes) {
  ExactBlocks out;
  for (auto s : block_sizes) out.push_back(RationalMatrix::identity(s));
  return out;
}

void check_block_sizes(const Imm& w, const MarginalScenario& scenario) {
  const auto want = context_sizes(scenario);
  const auto have = w.block_sizes();
  if (want.size() != have.size())
    throw InvalidInput("IMM has " + std::to_string(have.size()) + " blocks, scenario has " +
                       std::to_string(want.size()) + " contexts");
  for (std::size_t i = 0; i < want.size(); ++i)
    if (want[i] != have[i])
      throw InvalidInput("IMM block " + std::to_string(i + 1) + " has size " + std::to_string(have[i]) +
                         ", context has " + std::to_string(want[i]) + " outcomes");
}

// ------------------------------------------------------ preservation

PreservationReport is_scenario_preserving(const Imm& w, const AffineEmbedding& emb, double tol) {
  if (w.dimension() != emb.full_dim())
    throw InvalidInput("IMM acts on dimension " + std::to_string(w.dimension()) + ", embedding has " +
                       std::to_string(emb.full_dim()));
  const Eigen::MatrixXd W = w.dense();
  const Eigen::MatrixXd& M = emb.m_double();
  const Eigen::VectorXd& V = emb.v_double();
  const Eigen::MatrixXd T = emb.t_double();
  PreservationReport rep;
  const Eigen::MatrixXd WM = W * M;
  rep.map_residual = (M * (T * WM) - WM).cwiseAbs().maxCoeff();
  const Eigen::VectorXd WV = W * V;
  rep.offset_residual = (M * (T * WV) - (WV - V)).cwiseAbs().maxCoeff();
  rep.stochastic_residual = w.stochasticity_residual();
  if (rep.map_residual > tol) {
    rep.violated = "M T W M = W M";
  } else if (rep.offset_residual > tol) {
    rep.violated = "M T W V = (W - 1) V";
  } else if (rep.stochastic_residual > tol) {
    rep.violated = "column stochasticity";
  }
  rep.preserving = rep.violated.empty();
  return rep;
}

bool is_scenario_preserving_exact(const ExactBlocks& w, const AffineEmbedding& emb) {
  const RationalMatrix W = dense_exact(w);
  if (W.rows() != emb.full_dim()) throw InvalidInput("IMM and embedding dimensions differ");
  for (const auto& b : w)
    for (std::size_t k = 0; k < b.cols(); ++k) {
      Rational s = 0;
      for (std::size_t j = 0; j < b.rows(); ++j) {
        if (b(j, k) < 0) return false;
        s += b(j, k);
      }
      if (s != 1) return false;
    }
  const RationalMatrix T = emb.t();
  const RationalMatrix WM = W * emb.m();
  if (!(emb.m() * (T * WM) == WM)) return false;
  const RationalVector WV = W * emb.v();
  return emb.m() * (T * WV) == WV - emb.v();
}

ReducedAffineMap reduced_map(const Imm& w, const AffineEmbedding& emb) {
  if (w.dimension() != emb.full_dim()) throw InvalidInput("IMM and embedding dimensions differ");
  const Eigen::MatrixXd T = emb.t_double();
  const Eigen::MatrixXd TW = T * w.dense();
  return {TW * emb.m_double(), TW * emb.v_double()};
}

ExactReducedMap reduced_map_exact(const ExactBlocks& w, const AffineEmbedding& emb) {
  const RationalMatrix W = dense_exact(w);
  if (W.rows() != emb.full_dim()) throw InvalidInput("IMM and embedding dimensions differ");
  const RationalMatrix TW = emb.t() * W;
  return {TW * emb.m(), TW * emb.v()};
}

FullProbVector simulate(const Imm& w, const FullProbVector& c) {
  if (static_cast<std::size_t>(c.values.size()) != w.dimension())
    throw InvalidInput("simulate: vector has " + std::to_string(c.values.size()) + " entries, IMM acts on " +
                       std::to_string(w.dimension()));
  Eigen::VectorXd out(c.values.size());
  Eigen::Index off = 0;
  for (const auto& b : w.blocks()) {
    out.segment(off, b.rows()) = b * c.values.segment(off, b.rows());
    off += b.rows();
  }
  return {out};
}

RationalVector simulate_exact(const ExactBlocks& w, const RationalVector& c) {
  const RationalMatrix W = dense_exact(w);
  if (W.rows() != c.size()) throw InvalidInput("simulate: dimension mismatch");
  return W * c;
}

// ------------------------------------------------------ linear systems

double ImmLinearSystem::residual(const Eigen::VectorXd& w) const {
  if (static_cast<std::size_t>(w.size()) != entry_count())
    throw InvalidInput("IMM entry vector has " + std::to_string(w.size()) + " entries, system expects " +
                       std::to_string(entry_count()));
  if (a.rows() == 0) return 0.0;
  return (a_double() * w - b_double()).cwiseAbs().maxCoeff();
}

bool ImmLinearSystem::satisfied_exactly(const RationalVector& w) const {
  if (w.size() != entry_count()) throw InvalidInput("IMM entry vector has the wrong length");
  return a * w == b;
}

ImmLinearSystem preserving_system(const MarginalScenario& scenario, const AffineEmbedding& emb) {
  if (scenario.dimension() != emb.full_dim()) throw InvalidInput("scenario and embedding dimensions differ");
  const auto sizes = context_sizes(scenario);
  ImmLinearSystem sys = column_sum_system(sizes);
  const auto em = entry_map(sizes);
  const std::size_t entries = em.row.size();
  const std::size_t n = emb.full_dim(), l = emb.indep_dim();

  // Position in T of each full coordinate, or npos.
  std::vector<std::size_t> t_pos(n, static_cast<std::size_t>(-1));
  for (std::size_t s = 0; s < l; ++s) t_pos[emb.selected()[s]] = s;

  // For the unit matrix E at (r, c): M T E - E = (m_s - e_r) e_c^T where m_s
  // is the column of M for r's slot in T (zero when r is not selected).
  auto lhs = [&](std::size_t e, std::size_t a) -> Rational {
    const std::size_t r = em.row[e];
    Rational val = t_pos[r] == static_cast<std::size_t>(-1) ? Rational(0) : emb.m()(a, t_pos[r]);
    if (a == r) val -= 1;
    return val;
  };

  RowBasis basis(entries + 1);
  for (std::size_t r = 0; r < sys.a.rows(); ++r) {
    auto row = sys.a.row(r);
    row.push_back(-sys.b[r]);
    basis.add(std::move(row));
  }

  std::vector<RationalVector> rows;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t bcol = 0; bcol < l; ++bcol) {
      RationalVector row(entries + 1);
      for (std::size_t e = 0; e < entries; ++e) {
        const Rational& mc = emb.m()(em.col[e], bcol);
        if (mc != 0) row[e] = lhs(e, a) * mc;
      }
      if (basis.add(row)) {
        row.pop_back();
        rows.push_back(std::move(row));
        sys.b.emplace_back(0);
        sys.labels.push_back("M T W M = W M [" + std::to_string(a + 1) + "," + std::to_string(bcol + 1) + "]");
      }
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    RationalVector row(entries + 1);
    for (std::size_t e = 0; e < entries; ++e) {
      const Rational& vc = emb.v()[em.col[e]];
      if (vc != 0) row[e] = lhs(e, a) * vc;
    }
    row[entries] = emb.v()[a];  // constant moved left: A w + V_a = 0
    if (basis.add(row)) {
      row.pop_back();
      rows.push_back(std::move(row));
      sys.b.push_back(-emb.v()[a]);
      sys.labels.push_back("M T W V = (W - 1) V [" + std::to_string(a + 1) + "]");
    }
  }
  sys.a = append_rows(sys.a, rows);
  return sys;
}

ImmLinearSystem kcbs_constraints() {
  const std::vector<std::size_t> sizes(kcbs::kContexts, kcbs::kBlock);
  ImmLinearSystem sys = column_sum_system(sizes);
  auto at = [](std::size_t block, int j, int k) {
    return block * 16 + static_cast<std::size_t>((j - 1) * 4 + (k - 1));
  };
  struct Term {
    int sign, j, k;
    bool next;
  };
  const std::vector<std::pair<std::string, std::vector<Term>>> lines = {
      {"W11+W31 = W13+W33", {{1, 1, 1, false}, {1, 3, 1, false}, {-1, 1, 3, false}, {-1, 3, 3, false}}},
      {"W11+W21 = W12+W22", {{1, 1, 1, false}, {1, 2, 1, false}, {-1, 1, 2, false}, {-1, 2, 2, false}}},
      {"W12+W32 = W14+W34", {{1, 1, 2, false}, {1, 3, 2, false}, {-1, 1, 4, false}, {-1, 3, 4, false}}},
      {"W13+W23 = W14+W24", {{1, 1, 3, false}, {1, 2, 3, false}, {-1, 1, 4, false}, {-1, 2, 4, false}}},
      {"W11+W31 = W'11+W'21", {{1, 1, 1, false}, {1, 3, 1, false}, {-1, 1, 1, true}, {-1, 2, 1, true}}},
      {"W12+W32 = W'13+W'23", {{1, 1, 2, false}, {1, 3, 2, false}, {-1, 1, 3, true}, {-1, 2, 3, true}}},
  };
  std::vector<RationalVector> rows;
  for (std::size_t i = 0; i < kcbs::kContexts; ++i) {
    const std::size_t next = (i + 1) % kcbs::kContexts;
    for (const auto& [label, terms] : lines) {
      RationalVector row(kcbs::kImmEntries);
      for (const auto& t : terms) row[at(t.next ? next : i, t.j, t.k)] += t.sign;
      rows.push_back(std::move(row));
      sys.b.emplace_back(0);
      sys.labels.push_back("ctx" + std::to_string(i + 1) + ": " + label);
    }
  }
  sys.a = append_rows(sys.a, rows);
  return sys;
}

// ------------------------------------------------------ parametrization

Eigen::VectorXd ImmParametrization::w_of_y(const Eigen::VectorXd& y) const {
  if (static_cast<std::size_t>(y.size()) != parameter_count())
    throw InvalidInput("expected " + std::to_string(parameter_count()) + " parameters, got " +
                       std::to_string(y.size()));
  return to_eigen(offset) + basis.to_eigen() * y;
}

RationalVector ImmParametrization::w_of_y_exact(const RationalVector& y) const {
  if (y.size() != parameter_count()) throw InvalidInput("parameter vector has the wrong length");
  return offset + basis * y;
}

Eigen::VectorXd ImmParametrization::y_of_w(const Eigen::VectorXd& w) const {
  if (static_cast<std::size_t>(w.size()) != offset.size()) throw InvalidInput("entry vector has the wrong length");
  Eigen::VectorXd y(idx(free_entries.size()));
  for (std::size_t i = 0; i < free_entries.size(); ++i) y(idx(i)) = w(idx(free_entries[i])) - to_double(offset[free_entries[i]]);
  return y;
}

RationalVector ImmParametrization::y_of_w_exact(const RationalVector& w) const {
  if (w.size() != offset.size()) throw InvalidInput("entry vector has the wrong length");
  RationalVector y;
  for (auto f : free_entries) y.push_back(w[f] - offset[f]);
  return y;
}

Imm ImmParametrization::imm_of_y(const Eigen::VectorXd& y) const { return Imm::from_flat(w_of_y(y), block_sizes); }

Eigen::VectorXd ImmParametrization::positivity(const Eigen::VectorXd& y) const { return -w_of_y(y); }

ImmParametrization parametrize(const ImmLinearSystem& system) {
  const auto ech = row_reduce(system.a, system.b);
  if (!ech.consistent) throw InvalidInput("IMM constraint system is inconsistent");
  const auto ns = null_space(system.a);
  ImmParametrization p;
  p.block_sizes = system.block_sizes;
  p.basis = ns.basis;
  p.free_entries = ns.free_cols;
  p.offset.assign(system.entry_count(), Rational(0));
  for (std::size_t r = 0; r < ech.rank(); ++r) p.offset[ech.pivots[r]] = ech.rhs[r];
  return p;
}

ImmParametrization parametrize_kcbs() { return parametrize(kcbs_constraints()); }

// ------------------------------------------------------ structure

bool cyclically_contiguous(const std::vector<bool>& marked) {
  const std::size_t n = marked.size();
  std::size_t starts = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (marked[i] && !marked[(i + n - 1) % n]) ++starts;
  // All marked gives no run start; none marked gives none either.
  return starts <= 1;
}

StructuralReport structural_checks(const Imm& w, double identity_tol, double tol) {
  const std::size_t f = w.blocks().size();
  for (const auto& b : w.blocks())
    if (b.rows() != 4) throw InvalidInput("structural checks need 4x4 blocks");
  StructuralReport rep;
  for (const auto& b : w.blocks())
    rep.identity_blocks.push_back((b - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() <= identity_tol);

  auto note = [&](double r, const std::string& what) {
    rep.neighbour_residual = std::max(rep.neighbour_residual, r);
    if (r > tol && rep.first_failure.empty()) rep.first_failure = what;
  };
  using Pair = std::pair<int, int>;
  const std::vector<Pair> prev_zeros = {{2, 1}, {4, 1}, {1, 2}, {3, 2}, {2, 3}, {4, 3}, {1, 4}, {3, 4}};
  const std::vector<Pair> next_zeros = {{3, 1}, {4, 1}, {3, 2}, {4, 2}, {1, 3}, {2, 3}, {1, 4}, {2, 4}};
  for (std::size_t i = 0; i < f; ++i) {
    if (!rep.identity_blocks[i]) continue;
    const auto& p = w.block((i + f - 1) % f);
    const auto& n = w.block((i + 1) % f);
    const std::string tag = "identity block " + std::to_string(i + 1) + ": ";
    auto e = [](const Eigen::MatrixXd& b, int j, int k) { return b(j - 1, k - 1); };
    note(std::abs(e(p, 1, 1) - e(p, 2, 2)), tag + "previous W11 = W22");
    note(std::abs(e(p, 3, 3) - e(p, 4, 4)), tag + "previous W33 = W44");
    for (auto [j, k] : prev_zeros)
      note(std::abs(e(p, j, k)), tag + "previous W" + std::to_string(j) + std::to_string(k) + " = 0");
    note(std::abs(e(n, 1, 1) - e(n, 3, 3)), tag + "next W11 = W33");
    note(std::abs(e(n, 2, 2) - e(n, 4, 4)), tag + "next W22 = W44");
    for (auto [j, k] : next_zeros)
      note(std::abs(e(n, j, k)), tag + "next W" + std::to_string(j) + std::to_string(k) + " = 0");
  }
  for (std::size_t i = 0; i < f; ++i) {
    const std::size_t back2 = (i + f - 2) % f;
    if (rep.identity_blocks[i] && rep.identity_blocks[back2]) {
      if (!rep.identity_blocks[(i + f - 1) % f]) rep.middle_reading_holds = false;
      // The literal reading concludes what it assumes.
      if (!rep.identity_blocks[i]) rep.literal_reading_holds = false;
    }
  }
  std::vector<bool> invasive(f);
  for (std::size_t i = 0; i < f; ++i) invasive[i] = !rep.identity_blocks[i];
  rep.contiguous = cyclically_contiguous(invasive);
  return rep;
}

// ------------------------------------------------------ transport

TransportResult transport(const ImmLinearSystem& system, const AffineEmbedding& emb, const Eigen::VectorXd& source,
                          const Eigen::VectorXd& target, double tol) {
  const auto l = static_cast<Eigen::Index>(emb.indep_dim());
  if (source.size() != l || target.size() != l)
    throw InvalidInput("transport endpoints must have " + std::to_string(l) + " coordinates");
  const auto em = entry_map(system.block_sizes);
  const std::size_t entries = system.entry_count();
  const Eigen::VectorXd c = emb.m_double() * source + emb.v_double();

  lp::LpProblem prob(entries);
  prob.sense = lp::LpProblem::Sense::Maximize;
  const auto rows = static_cast<Eigen::Index>(system.a.rows());
  prob.a_eq = Eigen::MatrixXd::Zero(rows + l, idx(entries));
  prob.a_eq.topRows(rows) = system.a_double();
  prob.b_eq.resize(rows + l);
  prob.b_eq.head(rows) = system.b_double();
  prob.b_eq.tail(l) = target;
  std::vector<std::size_t> t_pos(emb.full_dim(), static_cast<std::size_t>(-1));
  for (std::size_t s = 0; s < emb.indep_dim(); ++s) t_pos[emb.selected()[s]] = s;
  for (std::size_t e = 0; e < entries; ++e) {
    if (t_pos[em.row[e]] != static_cast<std::size_t>(-1))
      prob.a_eq(rows + idx(t_pos[em.row[e]]), idx(e)) = c(idx(em.col[e]));
    if (em.row[e] == em.col[e]) prob.objective(idx(e)) = 1.0;
  }
  lp::LpOptions opt;
  opt.tol = tol;
  const auto sol = lp::solve(prob, opt);
  TransportResult out;
  if (sol.status != lp::LpStatus::Optimal) return out;
  out.feasible = true;
  out.map = Imm::from_flat(sol.x, system.block_sizes);
  const auto red = reduced_map(*out.map, emb);
  out.residual = std::max({(red.apply(source) - target).cwiseAbs().maxCoeff(), system.residual(sol.x),
                           std::max(0.0, -sol.x.minCoeff())});
  return out;
}

TransportResult vertex_transport(std::size_t from, std::size_t to, double tol) {
  static const auto vertices = kcbs::nd_vertices();
  static const auto system = kcbs_constraints();
  static const auto emb = kcbs::embedding();
  if (from < 1 || from > vertices.size() || to < 1 || to > vertices.size())
    throw InvalidInput("vertex indices must lie in 1.." + std::to_string(vertices.size()));
  return transport(system, emb, to_eigen(vertices[from - 1]), to_eigen(vertices[to - 1]), tol);
}

}  // namespace contextua
