#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "contextua/imm.hpp"
#include "contextua/polytope.hpp"
#include "contextua/scenario.hpp"

namespace contextua {

/// Everything the invasiveness cost needs about a scenario.
struct IcProblem {
  AffineEmbedding embedding;
  ImmLinearSystem system;
  std::vector<RationalVector> nc_vertices;
  /// Optional; enables the transport upper bound.
  std::vector<RationalVector> nd_vertices;

  static IcProblem kcbs();
  /// Builds the scenario-preserving system by elimination (general scenarios).
  static IcProblem from_scenario(const MarginalScenario& scenario, const AffineEmbedding& emb);
};

struct IcConfig {
  std::size_t starts = 64;
  std::uint64_t seed = 0x5eed;
  double rho_initial = 10.0;
  double rho_growth = 2.0;
  double rho_max = 1e6;
  std::size_t outer_iterations = 40;
  std::size_t inner_iterations = 3000;
  std::size_t nonmonotone_memory = 10;
  double dirichlet_alpha = 0.3;
  double constraint_tol = 1e-9;  ///< augmented-Lagrangian stopping rule
  double certify_tol = 1e-6;     ///< accepted witness residual
  double membership_tol = 1e-9;
  bool upper_bound = true;
  std::size_t threads = 1;
};

enum class IcStatus { Converged, BoundaryZero, Failed };
const char* to_string(IcStatus s);

struct IcStart {
  std::uint64_t seed = 0;
  double value = 0.0;
  double residual = 0.0;
  std::size_t outer_iterations = 0;
  bool accepted = false;
};

struct IcResult {
  IcStatus status = IcStatus::Failed;
  double value = 0.0;  ///< ||W - 1||_F of the witness
  Imm witness;
  ReducedAffineMap reduced;
  Eigen::VectorXd classical_point;  ///< c with Z c + v = q
  Eigen::VectorXd weights;          ///< convex weights of c over the NC vertices
  double residual = 0.0;            ///< certified constraint residual of the witness
  std::vector<IcStart> starts;
  /// min over NC vertices a of ||sum_b mu_b W(a->b) - 1||_F, q = sum_b mu_b e_b.
  std::optional<double> upper_bound;
};

/// Minimum ||W - 1||_F over scenario-preserving W and noncontextual c with
/// T W (M c + V) = q. Multistart augmented Lagrangian with spectral projected
/// gradient steps over (entries of W in [0, 1], weights of c in the
/// simplex). Points of the noncontextuality polytope return 0 and the
/// identity without optimizing.
///
/// Throws InvalidInput when q lies outside the non-disturbance polytope.
IcResult invasiveness_cost(const IcProblem& problem, const IndepProbVector& q, const IcConfig& cfg = {});
IcResult invasiveness_cost(const IndepProbVector& q, const IcConfig& cfg = {});

/// Maximal weight of a noncontextual sub-model dominated by embed(q),
/// entrywise; value = 1 - weight.
struct CfLpResult {
  double value = 0.0;
  Eigen::VectorXd weights;
};
CfLpResult contextual_fraction_lp(const AffineEmbedding& emb, const std::vector<RationalVector>& nc_vertices,
                                  const IndepProbVector& q, double tol = 1e-9);

/// Normalization of a facet functional in the closed form
/// max_i (q.f_i - b_i) / (||f_i|| - b_i).
enum class CfNorm {
  NdMax,    ///< max of f_i over the non-disturbance polytope
  OneNorm,  ///< sum of |f_i| entries
};
const char* to_string(CfNorm n);

struct CfResult {
  double value = 0.0;  ///< from the LP
  Eigen::VectorXd lp_weights;
  double formula_value = 0.0;  ///< closed form, clamped at 0
  std::size_t max_facet_index = 0;
};

/// KCBS contextual fraction by LP plus the facet closed form.
CfResult contextual_fraction(const IndepProbVector& q, CfNorm norm = CfNorm::NdMax, double tol = 1e-9);
double facet_norm(const RationalVector& f, CfNorm norm);

struct SweepConfig {
  std::size_t lambda_steps = 20;
  std::size_t a_steps = 20;
  bool ic = true;
  bool cf = true;
  CfNorm norm = CfNorm::NdMax;
  IcConfig ic_config;
  std::size_t threads = 1;
};

struct SweepRow {
  double lambda = 0.0;
  double a = 0.0;
  double kcbs_value = 0.0;
  std::optional<double> ic;
  std::optional<double> cf;
  std::string ic_status;  ///< "converged", "boundary-zero", "failed", "skipped" or "error"
  std::optional<double> ic_residual;
};

/// Evaluates the qutrit family on linspace(0, 1) x linspace(0, 1), lambda
/// outer. Cell k uses seed mix(cfg.seed, k), so rows do not depend on the
/// thread count. Failing cells are marked, not fatal.
std::vector<SweepRow> sweep(const SweepConfig& cfg);

/// Columns: lambda,a,kcbs_value,ic,cf,ic_status,ic_residual.
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Per-cell seed derivation (splitmix64 of seed and index).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace contextua
