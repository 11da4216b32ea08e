#include "contextua/quantifiers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <random>

#include "contextua/errors.hpp"
#include "contextua/kcbs_data.hpp"
#include "contextua/linprog.hpp"
#include "contextua/quantum_kcbs.hpp"
#include "parallel.hpp"

namespace contextua {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    css += u[j];
    const double t = (css - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

/// Data shared by all starts of one invasiveness-cost solve.
struct IcData {
  Eigen::MatrixXd a;    // system rows
  Eigen::VectorXd b;
  Eigen::MatrixXd ef;   // full NC vertices, one per column
  Eigen::VectorXd q_full;
  Eigen::VectorXd w_id;
  std::vector<Eigen::Index> row, col;  // position of each flat entry
  Eigen::LDLT<Eigen::MatrixXd> aat;    // for snapping onto A w = b
};

struct Eval {
  double l = 0.0;
  Eigen::VectorXd gw, gl, hl, r;
};

class AugmentedLagrangian {
 public:
  AugmentedLagrangian(const IcData& d, double rho) : d_(d), rho_(rho) {
    mu_lin_ = Eigen::VectorXd::Zero(d.a.rows());
    mu_r_ = Eigen::VectorXd::Zero(d.q_full.size());
  }

  void residuals(const Eigen::VectorXd& w, const Eigen::VectorXd& lam, Eigen::VectorXd& hl, Eigen::VectorXd& r,
                 Eigen::VectorXd& c) const {
    c = d_.ef * lam;
    r = -d_.q_full;
    for (Eigen::Index e = 0; e < w.size(); ++e) r(d_.row[e]) += w(e) * c(d_.col[e]);
    hl = d_.a * w - d_.b;
  }

  Eval operator()(const Eigen::VectorXd& w, const Eigen::VectorXd& lam) const {
    Eval ev;
    Eigen::VectorXd c;
    residuals(w, lam, ev.hl, ev.r, c);
    const Eigen::VectorXd dev = w - d_.w_id;
    ev.l = dev.squaredNorm() + mu_lin_.dot(ev.hl) + 0.5 * rho_ * ev.hl.squaredNorm() + mu_r_.dot(ev.r) +
           0.5 * rho_ * ev.r.squaredNorm();
    const Eigen::VectorXd gr = mu_r_ + rho_ * ev.r;
    ev.gw = 2.0 * dev + d_.a.transpose() * (mu_lin_ + rho_ * ev.hl);
    Eigen::VectorXd gc = Eigen::VectorXd::Zero(c.size());
    for (Eigen::Index e = 0; e < w.size(); ++e) {
      ev.gw(e) += gr(d_.row[e]) * c(d_.col[e]);
      gc(d_.col[e]) += w(e) * gr(d_.row[e]);
    }
    ev.gl = d_.ef.transpose() * gc;
    return ev;
  }

  void update(const Eval& ev, double growth, double rho_max) {
    mu_lin_ += rho_ * ev.hl;
    mu_r_ += rho_ * ev.r;
    rho_ = std::min(rho_ * growth, rho_max);
  }

 private:
  const IcData& d_;
  double rho_;
  Eigen::VectorXd mu_lin_, mu_r_;
};

struct StartOutcome {
  Eigen::VectorXd w, lam;
  double residual = std::numeric_limits<double>::infinity();
  double value = std::numeric_limits<double>::infinity();
  std::size_t outer = 0;
};

/// Spectral projected gradient on the augmented Lagrangian with a
/// nonmonotone (max of the last few values) Armijo search.
void spg(const AugmentedLagrangian& al, Eigen::VectorXd& w, Eigen::VectorXd& lam, Eval& ev, const IcConfig& cfg) {
  ev = al(w, lam);
  double alpha = 1.0;
  std::deque<double> hist{ev.l};
  for (std::size_t it = 0; it < cfg.inner_iterations; ++it) {
    const Eigen::VectorXd dw = (w - alpha * ev.gw).cwiseMax(0.0).cwiseMin(1.0) - w;
    const Eigen::VectorXd dl = project_simplex(lam - alpha * ev.gl) - lam;
    const double gd = ev.gw.dot(dw) + ev.gl.dot(dl);
    if (std::abs(gd) < 1e-14) break;
    const double lref = *std::max_element(hist.begin(), hist.end());
    double t = 1.0;
    Eigen::VectorXd tw, tl;
    Eval nev;
    while (true) {
      tw = w + t * dw;
      tl = lam + t * dl;
      nev = al(tw, tl);
      if (nev.l <= lref + 1e-4 * t * gd) break;
      t *= 0.5;
      if (t < 1e-12) break;
    }
    const double ss = (tw - w).squaredNorm() + (tl - lam).squaredNorm();
    const double sy = (tw - w).dot(nev.gw - ev.gw) + (tl - lam).dot(nev.gl - ev.gl);
    alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-6, 1e3) : 1e3;
    w = std::move(tw);
    lam = std::move(tl);
    ev = std::move(nev);
    hist.push_back(ev.l);
    if (hist.size() > cfg.nonmonotone_memory) hist.pop_front();
  }
}

/// Exact minimizer of ||w - 1||^2 over {A w = b, W c = q, w >= 0} for the
/// fixed classical point c = Ef lam. Semismooth Newton on the concave dual
/// theta(nu) = 1/2 ||w(nu) - 1||^2 - nu.(E w(nu) - g), w(nu) = max(0, 1 + E^T nu),
/// with an Armijo search. Returns nullopt when the subproblem looks
/// infeasible (the dual does not settle).
std::optional<Eigen::VectorXd> polish(const IcData& d, const Eigen::VectorXd& lam) {
  const Eigen::Index n = d.w_id.size(), ma = d.a.rows(), mr = d.q_full.size();
  const Eigen::VectorXd c = d.ef * lam;
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(ma + mr, n);
  e.topRows(ma) = d.a;
  for (Eigen::Index k = 0; k < n; ++k) e(ma + d.row[k], k) = c(d.col[k]);
  Eigen::VectorXd g(ma + mr);
  g << d.b, d.q_full;
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(ma + mr);

  auto primal = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return (d.w_id + e.transpose() * v).cwiseMax(0.0);
  };
  auto theta = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
    return 0.5 * (w - d.w_id).squaredNorm() - v.dot(e * w - g);
  };
  Eigen::VectorXd w = primal(nu);
  double th = theta(nu, w);
  for (int iter = 0; iter < 100; ++iter) {
    const Eigen::VectorXd r = g - e * w;  // dual gradient
    if (r.cwiseAbs().maxCoeff() <= 1e-11) return w;
    // Generalized Jacobian; entries sitting exactly on the kink count as free.
    const Eigen::VectorXd z = d.w_id + e.transpose() * nu;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(ma + mr, ma + mr);
    for (Eigen::Index k = 0; k < n; ++k)
      if (z(k) >= 0.0) h.noalias() += e.col(k) * e.col(k).transpose();
    // Regularize by the residual so steps stay bounded where the active
    // set makes the Jacobian singular; the term vanishes near the solution.
    h.diagonal().array() += std::min(1.0, r.norm()) + 1e-14;
    const Eigen::VectorXd step = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(h).solve(r);
    const double slope = step.dot(r);
    if (!(slope > 0.0)) break;
    double t = 1.0;
    bool accepted = false;
    while (t > 1e-10) {
      const Eigen::VectorXd trial = nu + t * step;
      const Eigen::VectorXd tw = primal(trial);
      const double tth = theta(trial, tw);
      // theta is concave and maximized.
      if (tth >= th + 1e-4 * t * slope) {
        nu = trial;
        w = tw;
        th = tth;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  return std::nullopt;
}

StartOutcome run_start(const IcData& d, const IcConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(cfg.dirichlet_alpha);
  Eigen::VectorXd lam(d.ef.cols());
  for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = gamma(rng);
  if (lam.sum() <= 0.0) lam.setOnes();
  lam /= lam.sum();
  Eigen::VectorXd w = d.w_id;

  AugmentedLagrangian al(d, cfg.rho_initial);
  StartOutcome out;
  Eval ev;
  for (std::size_t o = 0; o < cfg.outer_iterations; ++o) {
    spg(al, w, lam, ev, cfg);
    out.outer = o + 1;
    const double viol = std::max(ev.hl.cwiseAbs().maxCoeff(), ev.r.cwiseAbs().maxCoeff());
    if (viol < cfg.constraint_tol) break;
    al.update(ev, cfg.rho_growth, cfg.rho_max);
  }

  if (auto pw = polish(d, lam)) {
    w = std::move(*pw);
  } else {
    // Snap onto A w = b and clear round-off negatives, then measure honestly.
    w -= d.a.transpose() * d.aat.solve(d.a * w - d.b);
    w = w.cwiseMax(0.0);
  }
  Eigen::VectorXd hl, r, c;
  al.residuals(w, lam, hl, r, c);
  out.residual = std::max(hl.cwiseAbs().maxCoeff(), r.cwiseAbs().maxCoeff());
  out.value = (w - d.w_id).norm();
  out.w = std::move(w);
  out.lam = std::move(lam);
  return out;
}

std::vector<Eigen::Index> to_index(const std::vector<std::size_t>& v) {
  return {v.begin(), v.end()};
}

Eigen::MatrixXd vertex_matrix(const std::vector<RationalVector>& vs) {
  Eigen::MatrixXd m(idx(vs.front().size()), idx(vs.size()));
  for (std::size_t k = 0; k < vs.size(); ++k) m.col(idx(k)) = to_eigen(vs[k]);
  return m;
}

void require_nondisturbing(const AffineEmbedding& emb, const IndepProbVector& q, double tol) {
  if (static_cast<std::size_t>(q.values.size()) != emb.indep_dim())
    throw InvalidInput("q has " + std::to_string(q.values.size()) + " entries, expected " +
                       std::to_string(emb.indep_dim()));
  if (!q.values.allFinite()) throw InvalidInput("q has non-finite entries");
  const Eigen::VectorXd full = embed(emb, q).values;
  Eigen::Index at = 0;
  const double lo = full.minCoeff(&at);
  if (lo < -tol)
    throw InvalidInput("q is outside the non-disturbance polytope: full probability " + std::to_string(at + 1) +
                       " equals " + std::to_string(lo));
}

std::optional<double> transport_upper_bound(const IcProblem& p, const IndepProbVector& q, double tol) {
  if (p.nd_vertices.empty()) return std::nullopt;
  const auto m = member(VertexPolytope(p.nd_vertices), q.values, tol);
  if (!m.inside) return std::nullopt;
  std::optional<double> best;
  for (const auto& source : p.nc_vertices) {
    const Eigen::VectorXd src = to_eigen(source);
    Eigen::VectorXd mix = Eigen::VectorXd::Zero(idx(p.system.entry_count()));
    bool ok = true;
    for (Eigen::Index b = 0; b < m.weights.size() && ok; ++b) {
      if (m.weights(b) <= 1e-12) continue;
      const auto tr = transport(p.system, p.embedding, src, to_eigen(p.nd_vertices[static_cast<std::size_t>(b)]), tol);
      if (!tr.feasible) ok = false;
      else mix += m.weights(b) * tr.map->flat();
    }
    if (!ok) continue;
    const double val = (mix - Imm::identity(p.system.block_sizes).flat()).norm();
    if (!best || val < *best) best = val;
  }
  return best;
}

}  // namespace

const char* to_string(IcStatus s) {
  switch (s) {
    case IcStatus::Converged: return "converged";
    case IcStatus::BoundaryZero: return "boundary-zero";
    case IcStatus::Failed: return "failed";
  }
  return "?";
}

const char* to_string(CfNorm n) {
  switch (n) {
    case CfNorm::NdMax: return "nd-max";
    case CfNorm::OneNorm: return "one-norm";
  }
  return "?";
}

IcProblem IcProblem::kcbs() {
  return {kcbs::embedding(), kcbs_constraints(), kcbs::nc_vertices(), kcbs::nd_vertices()};
}

IcProblem IcProblem::from_scenario(const MarginalScenario& scenario, const AffineEmbedding& emb) {
  return {emb, preserving_system(scenario, emb), deterministic_vertices(scenario, emb).distinct, {}};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

IcResult invasiveness_cost(const IcProblem& p, const IndepProbVector& q, const IcConfig& cfg) {
  require_nondisturbing(p.embedding, q, cfg.membership_tol);
  const auto& emb = p.embedding;
  const auto sizes = p.system.block_sizes;

  IcResult res;
  const auto nc = member(VertexPolytope(p.nc_vertices), q.values, cfg.membership_tol);
  if (nc.inside) {
    res.status = IcStatus::BoundaryZero;
    res.value = 0.0;
    res.witness = Imm::identity(sizes);
    res.reduced = reduced_map(res.witness, emb);
    res.weights = nc.weights;
    res.classical_point = vertex_matrix(p.nc_vertices) * nc.weights;
    res.residual = nc.residual;
    return res;
  }
  if (cfg.starts == 0) throw InvalidInput("invasiveness cost needs at least one start");

  IcData d;
  d.a = p.system.a_double();
  d.b = p.system.b_double();
  d.ef = emb.m_double() * vertex_matrix(p.nc_vertices);
  d.ef.colwise() += emb.v_double();
  d.q_full = embed(emb, q).values;
  const Imm id = Imm::identity(sizes);
  d.w_id = id.flat();
  std::vector<std::size_t> rows, cols;
  std::size_t off = 0;
  for (auto s : sizes) {
    for (std::size_t j = 0; j < s; ++j)
      for (std::size_t k = 0; k < s; ++k) {
        rows.push_back(off + j);
        cols.push_back(off + k);
      }
    off += s;
  }
  d.row = to_index(rows);
  d.col = to_index(cols);
  d.aat.compute(d.a * d.a.transpose());

  std::vector<StartOutcome> outcomes(cfg.starts);
  detail::parallel_for(cfg.starts, cfg.threads,
                       [&](std::size_t s) { outcomes[s] = run_start(d, cfg, mix_seed(cfg.seed, s)); });

  std::optional<std::size_t> best;
  for (std::size_t s = 0; s < cfg.starts; ++s) {
    const auto& o = outcomes[s];
    const bool accepted = o.residual <= cfg.certify_tol;
    res.starts.push_back({mix_seed(cfg.seed, s), o.value, o.residual, o.outer, accepted});
    if (accepted && (!best || o.value < outcomes[*best].value)) best = s;
  }
  if (cfg.upper_bound) res.upper_bound = transport_upper_bound(p, q, cfg.membership_tol);
  if (!best) {
    res.status = IcStatus::Failed;
    auto least = std::min_element(outcomes.begin(), outcomes.end(),
                                  [](const auto& x, const auto& y) { return x.residual < y.residual; });
    res.residual = least->residual;
    res.value = least->value;
    return res;
  }
  const auto& o = outcomes[*best];
  res.status = IcStatus::Converged;
  res.value = o.value;
  res.witness = Imm::from_flat(o.w, sizes);
  res.reduced = reduced_map(res.witness, emb);
  res.weights = o.lam;
  res.classical_point = vertex_matrix(p.nc_vertices) * o.lam;
  const auto pres = is_scenario_preserving(res.witness, emb, std::numeric_limits<double>::infinity());
  res.residual = std::max({o.residual, pres.map_residual, pres.offset_residual, pres.stochastic_residual,
                           (res.reduced.apply(res.classical_point) - q.values).cwiseAbs().maxCoeff()});
  if (res.residual > cfg.certify_tol) res.status = IcStatus::Failed;
  return res;
}

IcResult invasiveness_cost(const IndepProbVector& q, const IcConfig& cfg) {
  static const IcProblem problem = IcProblem::kcbs();
  return invasiveness_cost(problem, q, cfg);
}

CfLpResult contextual_fraction_lp(const AffineEmbedding& emb, const std::vector<RationalVector>& nc_vertices,
                                  const IndepProbVector& q, double tol) {
  require_nondisturbing(emb, q, tol);
  if (nc_vertices.empty()) throw InvalidInput("contextual fraction needs noncontextual vertices");
  Eigen::MatrixXd ef = emb.m_double() * vertex_matrix(nc_vertices);
  ef.colwise() += emb.v_double();
  lp::LpProblem prob(nc_vertices.size());
  prob.sense = lp::LpProblem::Sense::Maximize;
  prob.objective.setOnes();
  prob.a_ub = ef;
  prob.b_ub = embed(emb, q).values.cwiseMax(0.0);
  lp::LpOptions opt;
  opt.tol = tol;
  const auto sol = lp::solve(prob, opt);
  if (sol.status != lp::LpStatus::Optimal)
    throw SolverFailure(std::string("contextual fraction LP ended ") + lp::to_string(sol.status));
  return {std::clamp(1.0 - sol.objective, 0.0, 1.0), sol.x};
}

double facet_norm(const RationalVector& f, CfNorm norm) {
  Rational out = 0;
  if (norm == CfNorm::OneNorm) {
    for (const auto& x : f) out += x < 0 ? Rational(-x) : x;
  } else {
    static const auto nd = kcbs::nd_vertices();
    if (f.size() != nd.front().size()) throw InvalidInput("facet has the wrong dimension");
    bool first = true;
    for (const auto& v : nd) {
      Rational s = 0;
      for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * v[i];
      if (first || s > out) out = s;
      first = false;
    }
  }
  return to_double(out);
}

CfResult contextual_fraction(const IndepProbVector& q, CfNorm norm, double tol) {
  static const auto emb = kcbs::embedding();
  static const auto nc = kcbs::nc_vertices();
  static const auto normals = kcbs::facet_normals();
  static const auto bounds = kcbs::facet_bounds();
  const auto lp = contextual_fraction_lp(emb, nc, q, tol);
  CfResult out;
  out.value = lp.value;
  out.lp_weights = lp.weights;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < normals.size(); ++i) {
    const double b = to_double(bounds[i]);
    const double denom = facet_norm(normals[i], norm) - b;
    if (denom <= 0.0) continue;
    const double val = (to_eigen(normals[i]).dot(q.values) - b) / denom;
    if (val > best) {
      best = val;
      out.max_facet_index = i;
    }
  }
  out.formula_value = std::max(0.0, best);
  return out;
}

std::vector<SweepRow> sweep(const SweepConfig& cfg) {
  if (cfg.lambda_steps < 2 || cfg.a_steps < 2) throw InvalidInput("sweep grid needs at least 2 points per axis");
  const std::size_t cells = cfg.lambda_steps * cfg.a_steps;
  std::vector<SweepRow> rows(cells);
  auto cell = [&](std::size_t k) {
    SweepRow& row = rows[k];
    row.lambda = static_cast<double>(k / cfg.a_steps) / static_cast<double>(cfg.lambda_steps - 1);
    row.a = static_cast<double>(k % cfg.a_steps) / static_cast<double>(cfg.a_steps - 1);
    const auto q = quantum::probabilities({row.lambda, row.a});
    row.kcbs_value = quantum::kcbs_value(q);
    row.ic_status = "skipped";
    if (cfg.ic) {
      IcConfig ic_cfg = cfg.ic_config;
      ic_cfg.seed = mix_seed(cfg.ic_config.seed, k);
      ic_cfg.threads = 1;
      try {
        const auto r = invasiveness_cost(q, ic_cfg);
        row.ic_status = to_string(r.status);
        row.ic_residual = r.residual;
        if (r.status != IcStatus::Failed) row.ic = r.value;
      } catch (const std::exception&) {
        row.ic_status = "error";
      }
    }
    if (cfg.cf) {
      try {
        row.cf = contextual_fraction(q, cfg.norm).value;
      } catch (const std::exception&) {
      }
    }
  };
  detail::parallel_for(cells, cfg.threads, cell);
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  auto num = [](std::optional<double> x) -> std::string {
    if (!x) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", *x);
    return buf;
  };
  std::string out = "lambda,a,kcbs_value,ic,cf,ic_status,ic_residual\n";
  for (const auto& r : rows) {
    out += num(r.lambda) + ',' + num(r.a) + ',' + num(r.kcbs_value) + ',' + num(r.ic) + ',' + num(r.cf) + ',' +
           r.ic_status + ',' + num(r.ic_residual) + '\n';
  }
  return out;
}

}  // namespace contextua
