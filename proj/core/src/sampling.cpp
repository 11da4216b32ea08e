#include <random>

#include "contextua/errors.hpp"
#include "contextua/imm.hpp"
#include "contextua/linprog.hpp"

namespace contextua {

ImmSampler::ImmSampler(ImmLinearSystem sys, std::vector<std::size_t> pinned_identity)
    : system(std::move(sys)), pinned(std::move(pinned_identity)) {
  for (auto p : pinned)
    if (p >= system.block_sizes.size())
      throw InvalidInput("pinned block " + std::to_string(p + 1) + " does not exist");
}

Imm ImmSampler::sample(std::uint64_t seed, std::size_t vertices) const {
  if (vertices == 0) throw InvalidInput("sampler needs at least one vertex");
  const std::size_t entries = system.entry_count();
  std::vector<std::size_t> offsets{0};
  for (auto s : system.block_sizes) offsets.push_back(offsets.back() + s * s);

  std::size_t pinned_entries = 0;
  for (auto p : pinned) pinned_entries += system.block_sizes[p] * system.block_sizes[p];

  lp::LpProblem prob(entries);
  const auto rows = static_cast<Eigen::Index>(system.a.rows());
  const auto extra = static_cast<Eigen::Index>(pinned_entries);
  prob.a_eq = Eigen::MatrixXd::Zero(rows + extra, static_cast<Eigen::Index>(entries));
  prob.a_eq.topRows(rows) = system.a_double();
  prob.b_eq = Eigen::VectorXd::Zero(rows + extra);
  prob.b_eq.head(rows) = system.b_double();
  Eigen::Index r = rows;
  for (auto p : pinned) {
    const auto s = system.block_sizes[p];
    for (std::size_t j = 0; j < s; ++j)
      for (std::size_t k = 0; k < s; ++k, ++r) {
        prob.a_eq(r, static_cast<Eigen::Index>(offsets[p] + j * s + k)) = 1.0;
        prob.b_eq(r) = j == k ? 1.0 : 0.0;
      }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::gamma_distribution<double> gamma(1.0);
  Eigen::VectorXd mix = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(entries));
  double total = 0.0;
  for (std::size_t v = 0; v < vertices; ++v) {
    for (Eigen::Index e = 0; e < prob.objective.size(); ++e) prob.objective(e) = normal(rng);
    const auto sol = lp::solve(prob);
    if (sol.status != lp::LpStatus::Optimal) throw SolverFailure("sampler: constraint polytope is empty");
    const double weight = gamma(rng);
    mix += weight * sol.x;
    total += weight;
  }
  mix /= total;
  // Pinned entries are exact in every vertex; keep them exact after mixing.
  for (auto p : pinned) {
    const auto s = system.block_sizes[p];
    for (std::size_t j = 0; j < s; ++j)
      for (std::size_t k = 0; k < s; ++k)
        mix(static_cast<Eigen::Index>(offsets[p] + j * s + k)) = j == k ? 1.0 : 0.0;
  }
  return Imm::from_flat(mix, system.block_sizes);
}

}  // namespace contextua
