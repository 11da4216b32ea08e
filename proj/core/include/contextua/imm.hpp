#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "contextua/rational.hpp"
#include "contextua/scenario.hpp"

namespace contextua {

/// Block-diagonal map on full probability vectors, one square block per
/// context. Entries are addressed in a flat layout: block after block, each
/// block row-major.
class Imm {
 public:
  /// Empty map with no blocks.
  Imm() = default;
  /// Throws InvalidInput unless every block is square and non-empty.
  explicit Imm(std::vector<Eigen::MatrixXd> blocks);

  static Imm identity(const std::vector<std::size_t>& block_sizes);
  static Imm identity(const MarginalScenario& scenario);
  static Imm from_exact(const std::vector<RationalMatrix>& blocks);
  static Imm from_flat(const Eigen::VectorXd& entries, const std::vector<std::size_t>& block_sizes);

  const std::vector<Eigen::MatrixXd>& blocks() const { return blocks_; }
  const Eigen::MatrixXd& block(std::size_t i) const { return blocks_.at(i); }
  std::vector<std::size_t> block_sizes() const;
  std::size_t dimension() const { return dim_; }
  std::size_t entry_count() const;

  Eigen::MatrixXd dense() const;
  Eigen::VectorXd flat() const;

  /// ||W - 1||_F.
  double distance_to_identity() const;

  /// Largest violation of entry >= 0 and unit column sums.
  double stochasticity_residual() const;
  bool is_stochastic(double tol = 1e-9) const { return stochasticity_residual() <= tol; }

 private:
  std::vector<Eigen::MatrixXd> blocks_;
  std::size_t dim_ = 0;
};

using ExactBlocks = std::vector<RationalMatrix>;

RationalVector flatten(const ExactBlocks& blocks);
ExactBlocks identity_blocks(const std::vector<std::size_t>& block_sizes);

/// Throws InvalidInput if the block sizes do not match the scenario contexts.
void check_block_sizes(const Imm& w, const MarginalScenario& scenario);

struct PreservationReport {
  double map_residual = 0.0;     ///< max |M T W M - W M|
  double offset_residual = 0.0;  ///< max |M T W V - (W - 1) V|
  double stochastic_residual = 0.0;
  bool preserving = false;
  /// Name of the first identity that fails, empty when none does.
  std::string violated;
};

/// Checks M T W M = W M and M T W V = (W - 1) V together with column
/// stochasticity.
PreservationReport is_scenario_preserving(const Imm& w, const AffineEmbedding& emb, double tol = 1e-9);
/// Same identities in exact arithmetic.
bool is_scenario_preserving_exact(const ExactBlocks& w, const AffineEmbedding& emb);

struct ReducedAffineMap {
  Eigen::MatrixXd z;  ///< T W M
  Eigen::VectorXd v;  ///< T W V
  Eigen::VectorXd apply(const Eigen::VectorXd& c) const { return z * c + v; }
};

ReducedAffineMap reduced_map(const Imm& w, const AffineEmbedding& emb);

struct ExactReducedMap {
  RationalMatrix z;
  RationalVector v;
};
ExactReducedMap reduced_map_exact(const ExactBlocks& w, const AffineEmbedding& emb);

/// Q = W C. Throws InvalidInput on a dimension mismatch.
FullProbVector simulate(const Imm& w, const FullProbVector& c);
RationalVector simulate_exact(const ExactBlocks& w, const RationalVector& c);

/// Linear equalities A w = b over the flat entries of an IMM.
struct ImmLinearSystem {
  std::vector<std::size_t> block_sizes;
  RationalMatrix a;
  RationalVector b;
  std::vector<std::string> labels;  ///< one per row

  std::size_t entry_count() const { return a.cols(); }
  Eigen::MatrixXd a_double() const { return a.to_eigen(); }
  Eigen::VectorXd b_double() const { return to_eigen(b); }
  /// max |A w - b|.
  double residual(const Eigen::VectorXd& w) const;
  bool satisfied_exactly(const RationalVector& w) const;
};

/// Column sums plus an independent subset of the rows of the two
/// scenario-preserving identities, obtained by exact elimination.
ImmLinearSystem preserving_system(const MarginalScenario& scenario, const AffineEmbedding& emb);

/// The KCBS system: 20 column-sum rows, then 6 rows per context:
///   W11+W31 = W13+W33,  W11+W21 = W12+W22,  W12+W32 = W14+W34,
///   W13+W23 = W14+W24,  W11+W31 = W'11+W'21, W12+W32 = W'13+W'23
/// where W' is the next block (cyclically).
ImmLinearSystem kcbs_constraints();

/// Affine parametrization w(y) = offset + basis y of the solutions of an
/// ImmLinearSystem. The parameters are the entries at `free_entries`, so
/// y_of_w just reads them off.
struct ImmParametrization {
  std::vector<std::size_t> block_sizes;
  RationalMatrix basis;  ///< entries x parameters
  RationalVector offset;
  std::vector<std::size_t> free_entries;

  std::size_t parameter_count() const { return basis.cols(); }
  Eigen::VectorXd w_of_y(const Eigen::VectorXd& y) const;
  RationalVector w_of_y_exact(const RationalVector& y) const;
  Eigen::VectorXd y_of_w(const Eigen::VectorXd& w) const;
  RationalVector y_of_w_exact(const RationalVector& w) const;
  Imm imm_of_y(const Eigen::VectorXd& y) const;
  /// g_alpha(y) = -w_alpha(y); the candidate is a valid IMM iff all <= 0.
  Eigen::VectorXd positivity(const Eigen::VectorXd& y) const;
};

ImmParametrization parametrize(const ImmLinearSystem& system);
ImmParametrization parametrize_kcbs();

/// Checks of the neighbour-block consequences of an identity block in a
/// KCBS scenario-preserving map.
struct StructuralReport {
  std::vector<bool> identity_blocks;
  /// Largest violation of the neighbour equalities and zero patterns over
  /// all identity blocks.
  double neighbour_residual = 0.0;
  /// First failing neighbour condition, empty when all hold.
  std::string first_failure;
  /// Identity at i and i-2 forces identity at i-1.
  bool middle_reading_holds = true;
  /// Identity at i and i-2 "forces" identity at i (trivially true).
  bool literal_reading_holds = true;
  /// Non-identity blocks form one cyclic run (or none, or all).
  bool contiguous = true;
};

StructuralReport structural_checks(const Imm& w, double identity_tol = 1e-9, double tol = 1e-12);

/// True when the marked blocks form a single cyclic run.
bool cyclically_contiguous(const std::vector<bool>& marked);

struct TransportResult {
  bool feasible = false;
  std::optional<Imm> map;
  double residual = 0.0;  ///< max |T W (M c + V) - target|, system rows and negativity
};

/// Finds a map satisfying `system` with T W (M c + V) = target by linear
/// programming, maximizing the trace among feasible maps.
TransportResult transport(const ImmLinearSystem& system, const AffineEmbedding& emb,
                          const Eigen::VectorXd& source, const Eigen::VectorXd& target, double tol = 1e-9);

/// KCBS transport between non-disturbance vertices, 1-based indices.
TransportResult vertex_transport(std::size_t from, std::size_t to, double tol = 1e-9);

/// Random scenario-preserving maps: Dirichlet mixtures of LP vertices
/// reached with random objectives. Pinned blocks are held at the identity.
struct ImmSampler {
  ImmSampler(ImmLinearSystem system, std::vector<std::size_t> pinned_identity = {});
  Imm sample(std::uint64_t seed, std::size_t vertices = 6) const;

  ImmLinearSystem system;
  std::vector<std::size_t> pinned;
};

}  // namespace contextua
