#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>

#include <Eigen/Dense>

namespace contextua::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// minimize/maximize c.x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  lower <= x <= upper.
/// Empty `lower` means all zeros, empty `upper` means no upper bounds.
struct LpProblem {
  enum class Sense { Minimize, Maximize };

  Sense sense = Sense::Minimize;
  Eigen::VectorXd objective;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  explicit LpProblem(std::size_t num_vars = 0);

  std::size_t num_vars() const { return static_cast<std::size_t>(objective.size()); }
  /// Throws InvalidInput on inconsistent shapes or lower > upper.
  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  /// Largest violation of any equality, inequality or bound at `x`.
  double max_residual = 0.0;
  std::size_t iterations = 0;
};

struct LpOptions {
  double tol = 1e-9;                   ///< primal feasibility tolerance
  std::size_t max_iterations = 100000;  ///< guard against cycling
  /// Consecutive degenerate pivots tolerated before switching from
  /// Dantzig pricing to Bland's rule for the rest of the phase.
  std::size_t degenerate_switch = 50;
  std::ostream* trace = nullptr;  ///< per-pivot dump when set
};

/// Two-phase dense tableau simplex. Deterministic: identical inputs give
/// bit-identical outputs. Throws SolverFailure when the iteration guard trips.
LpSolution solve(const LpProblem& problem, const LpOptions& options = {});

}  // namespace contextua::lp
