#pragma once

#include <array>

#include <Eigen/Dense>

#include "contextua/scenario.hpp"

/// Qutrit realization of the KCBS scenario with A_i = 2|v_i><v_i| - 1.
namespace contextua::quantum {

/// v_i = (cos t, sin t cos phi_i, sin t sin phi_i), cos t = 5^(-1/4),
/// phi = (2pi/5, 6pi/5, 0, 4pi/5, 8pi/5). Consecutive vectors are orthogonal.
std::array<Eigen::Vector3d, 5> pentagram_vectors();

struct FamilyParams {
  double lambda = 1.0;  ///< weight of the pure part
  double a = 1.0;       ///< |psi_a> = a|1> + sqrt(1 - a^2)|2>
};

/// rho = (1 - lambda) 1/3 + lambda |psi_a><psi_a|. Throws InvalidInput for
/// parameters outside [0, 1].
Eigen::Matrix3d density_matrix(const FamilyParams& params);

/// Projectors of context (A_i, A_{i+1}) for outcomes (++, +-, -+, --):
/// 0, |v_i><v_i|, |v_{i+1}><v_{i+1}|, 1 - both.
std::array<Eigen::Matrix3d, 4> context_projectors(std::size_t context);

/// Independent probabilities from the closed form: odd entries 0, even
/// entries (1 - lambda)/3 + lambda (a 5^(-1/4) + sqrt((1 - a^2)(sqrt5 - 1)) 5^(-1/4) cos phi_i)^2.
IndepProbVector probabilities(const FamilyParams& params);

/// Full probability vector from traces Tr(Pi rho) for any 3x3 state.
FullProbVector full_probabilities(const Eigen::Matrix3d& rho);
FullProbVector full_probabilities(const FamilyParams& params);

/// Sum over contexts of P(A_i = +1, A_{i+1} = -1), i.e. the even entries.
/// Throws InvalidInput unless q has 10 entries.
double kcbs_value(const IndepProbVector& q);

/// Mixing weight at which kcbs_value reaches 2 on the a = 1 line.
double lambda_star();

}  // namespace contextua::quantum
