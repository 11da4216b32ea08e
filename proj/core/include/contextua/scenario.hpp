#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "contextua/rational.hpp"

namespace contextua {

struct Observable {
  std::string id;
  std::vector<int> outcomes;  ///< ordered, duplicate-free
};

struct Context {
  std::vector<std::string> members;
  std::vector<std::size_t> observable_indices;  ///< resolved positions of `members`
  std::size_t outcome_count = 0;                 ///< product of member outcome counts
};

/// Observables with finite outcome sets plus a family of contexts.
///
/// Probabilities are laid out context after context. Inside a context the
/// joint outcomes are ordered lexicographically over the member list, first
/// member most significant, each observable following its own outcome
/// order. With outcomes listed as {+1, -1} a pair context reads
/// (++, +-, -+, --).
class MarginalScenario {
 public:
  MarginalScenario(std::vector<Observable> observables,
                   const std::vector<std::vector<std::string>>& contexts);

  const std::vector<Observable>& observables() const { return observables_; }
  const std::vector<Context>& contexts() const { return contexts_; }

  /// n: total number of context probabilities.
  std::size_t dimension() const { return dimension_; }
  std::size_t context_offset(std::size_t ctx) const { return offsets_.at(ctx); }
  std::size_t observable_index(const std::string& id) const;

  /// Outcome positions (into each member's outcome list) of joint outcome `k`.
  std::vector<std::size_t> joint_outcome(std::size_t ctx, std::size_t k) const;
  /// Position of a joint outcome inside its context.
  std::size_t joint_index(std::size_t ctx, const std::vector<std::size_t>& outcome_positions) const;

  /// kappa: number of deterministic assignments of all observables.
  std::size_t assignment_count() const;

 private:
  std::vector<Observable> observables_;
  std::vector<Context> contexts_;
  std::vector<std::size_t> offsets_;
  std::size_t dimension_ = 0;
};

/// One linear identity on the full probability vector: coeffs . P = rhs.
struct ConsistencyConstraint {
  enum class Kind { Normalization, Marginalization };
  Kind kind;
  std::string label;
  RationalVector coeffs;
  Rational rhs;
};

/// Normalization rows (one per context) followed by one marginalization row
/// per outcome of every pairwise context intersection. Redundant rows are
/// kept; callers reduce them.
std::vector<ConsistencyConstraint> consistency_constraints(const MarginalScenario& scenario);

struct FullProbVector {
  Eigen::VectorXd values;
};

struct IndepProbVector {
  Eigen::VectorXd values;
};

/// How the independent coordinates (the rows of T) are chosen.
struct IndexPolicy {
  enum class Kind {
    Leading,   ///< round-robin over contexts, earliest positions first
    Trailing,  ///< round-robin over contexts, latest positions first
    Explicit,  ///< caller-supplied coordinate list, in order
  };
  Kind kind = Kind::Leading;
  std::vector<std::size_t> indices;

  static IndexPolicy leading() { return {}; }
  static IndexPolicy trailing() { return {Kind::Trailing, {}}; }
  static IndexPolicy explicit_indices(std::vector<std::size_t> idx) {
    return {Kind::Explicit, std::move(idx)};
  }
};

/// P = M p + V and p = T P, with T a coordinate selection.
class AffineEmbedding {
 public:
  AffineEmbedding(RationalMatrix m, RationalVector v, std::vector<std::size_t> selected);

  std::size_t full_dim() const { return m_.rows(); }
  std::size_t indep_dim() const { return m_.cols(); }

  const RationalMatrix& m() const { return m_; }
  const RationalVector& v() const { return v_; }
  /// Column picked by each row of T.
  const std::vector<std::size_t>& selected() const { return selected_; }
  RationalMatrix t() const;

  const Eigen::MatrixXd& m_double() const { return m_d_; }
  const Eigen::VectorXd& v_double() const { return v_d_; }
  Eigen::MatrixXd t_double() const;

  RationalVector embed_exact(const RationalVector& p) const;
  RationalVector project_exact(const RationalVector& full) const;

  friend bool operator==(const AffineEmbedding& a, const AffineEmbedding& b) {
    return a.m_ == b.m_ && a.v_ == b.v_ && a.selected_ == b.selected_;
  }

 private:
  RationalMatrix m_;
  RationalVector v_;
  std::vector<std::size_t> selected_;
  Eigen::MatrixXd m_d_;
  Eigen::VectorXd v_d_;
};

/// Builds (M, V, T) from the normalization and marginalization identities by
/// exact elimination. Throws InvalidInput when an explicit policy picks a
/// dependent coordinate (the message names it and proposes a valid set) or
/// when the constraint system has no solution.
AffineEmbedding derive_embedding(const MarginalScenario& scenario,
                                 const IndexPolicy& policy = IndexPolicy::leading());

FullProbVector embed(const AffineEmbedding& emb, const IndepProbVector& p);
IndepProbVector project(const AffineEmbedding& emb, const FullProbVector& full);

struct DeterministicVertices {
  std::vector<std::vector<std::size_t>> assignments;  ///< outcome positions per observable
  std::vector<RationalVector> full;                   ///< one per assignment
  std::vector<RationalVector> projected;              ///< T . full, one per assignment
  std::vector<RationalVector> distinct;               ///< `projected` without repeats, first-seen order
};

/// All kappa deterministic assignments, first observable most significant,
/// each observable cycling through its outcome list in order.
DeterministicVertices deterministic_vertices(const MarginalScenario& scenario,
                                             const AffineEmbedding& emb);

struct ConstraintCheck {
  std::string label;
  double residual = 0.0;
  bool passed = true;
};

struct ValidationReport {
  std::vector<ConstraintCheck> bounds;           ///< entries in [0, 1]
  std::vector<ConstraintCheck> normalization;
  std::vector<ConstraintCheck> marginalization;
  double max_residual = 0.0;
  bool ok() const;
  /// Label of the first failed check, if any.
  std::optional<std::string> first_failure() const;
};

ValidationReport validate_model(const MarginalScenario& scenario, const FullProbVector& full,
                                double tol = 1e-9);

}  // namespace contextua
