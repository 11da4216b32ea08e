#include "contextua/quantum_kcbs.hpp"

#include <cmath>
#include <numbers>

#include "contextua/errors.hpp"

namespace contextua::quantum {

namespace {

constexpr std::array<double, 5> kPhiTurns = {2.0 / 5, 6.0 / 5, 0.0, 4.0 / 5, 8.0 / 5};

double phi(std::size_t i) { return kPhiTurns[i] * std::numbers::pi; }

void check_params(const FamilyParams& p) {
  if (!(p.lambda >= 0.0 && p.lambda <= 1.0)) throw InvalidInput("lambda must lie in [0, 1]");
  if (!(p.a >= 0.0 && p.a <= 1.0)) throw InvalidInput("a must lie in [0, 1]");
}

}  // namespace

std::array<Eigen::Vector3d, 5> pentagram_vectors() {
  const double c = std::pow(5.0, -0.25);
  const double s = std::sqrt(1.0 - c * c);
  std::array<Eigen::Vector3d, 5> v;
  for (std::size_t i = 0; i < 5; ++i) v[i] = Eigen::Vector3d(c, s * std::cos(phi(i)), s * std::sin(phi(i)));
  return v;
}

Eigen::Matrix3d density_matrix(const FamilyParams& params) {
  check_params(params);
  const Eigen::Vector3d psi(params.a, std::sqrt(1.0 - params.a * params.a), 0.0);
  return (1.0 - params.lambda) / 3.0 * Eigen::Matrix3d::Identity() + params.lambda * psi * psi.transpose();
}

std::array<Eigen::Matrix3d, 4> context_projectors(std::size_t context) {
  if (context >= 5) throw InvalidInput("KCBS has 5 contexts");
  const auto v = pentagram_vectors();
  const Eigen::Matrix3d pi = v[context] * v[context].transpose();
  const Eigen::Matrix3d pj = v[(context + 1) % 5] * v[(context + 1) % 5].transpose();
  return {Eigen::Matrix3d::Zero(), pi, pj, Eigen::Matrix3d::Identity() - pi - pj};
}

IndepProbVector probabilities(const FamilyParams& params) {
  check_params(params);
  const double r = std::pow(5.0, -0.25);
  const double amp = std::sqrt((1.0 - params.a * params.a) * (std::sqrt(5.0) - 1.0)) * r;
  Eigen::VectorXd q = Eigen::VectorXd::Zero(10);
  for (std::size_t i = 0; i < 5; ++i) {
    const double t = params.a * r + amp * std::cos(phi(i));
    q(static_cast<Eigen::Index>(2 * i + 1)) = (1.0 - params.lambda) / 3.0 + params.lambda * t * t;
  }
  return {q};
}

FullProbVector full_probabilities(const Eigen::Matrix3d& rho) {
  Eigen::VectorXd p(20);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto proj = context_projectors(i);
    for (std::size_t k = 0; k < 4; ++k) p(static_cast<Eigen::Index>(4 * i + k)) = (proj[k] * rho).trace();
  }
  return {p};
}

FullProbVector full_probabilities(const FamilyParams& params) { return full_probabilities(density_matrix(params)); }

double kcbs_value(const IndepProbVector& q) {
  if (q.values.size() != 10)
    throw InvalidInput("KCBS value needs 10 independent probabilities, got " + std::to_string(q.values.size()));
  double s = 0.0;
  for (Eigen::Index i = 1; i < 10; i += 2) s += q.values(i);
  return s;
}

double lambda_star() { return 1.0 / (3.0 * std::sqrt(5.0) - 5.0); }

}  // namespace contextua::quantum
