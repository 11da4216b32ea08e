#pragma once

#include <initializer_list>
#include <random>

#include <Eigen/Dense>

#include "contextua/imm.hpp"
#include "contextua/rational.hpp"
#include "contextua/scenario.hpp"

namespace testing {

inline contextua::RationalVector ints(std::initializer_list<int> xs) {
  contextua::RationalVector v;
  for (int x : xs) v.emplace_back(x);
  return v;
}

inline contextua::RationalVector rationals(std::initializer_list<const char*> xs) {
  contextua::RationalVector v;
  for (auto x : xs) v.push_back(contextua::parse_rational(x));
  return v;
}

/// Dirichlet(alpha) weights.
inline Eigen::VectorXd dirichlet(std::mt19937_64& rng, Eigen::Index k, double alpha) {
  std::gamma_distribution<double> g(alpha);
  Eigen::VectorXd w(k);
  for (Eigen::Index i = 0; i < k; ++i) w(i) = g(rng);
  return w / w.sum();
}

inline Eigen::MatrixXd columns(const std::vector<contextua::RationalVector>& vs) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(vs.front().size()), static_cast<Eigen::Index>(vs.size()));
  for (std::size_t k = 0; k < vs.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = contextua::to_eigen(vs[k]);
  return m;
}

/// Exact copy of a double-valued map (every double is a dyadic rational).
inline std::vector<contextua::RationalMatrix> exact_blocks(const contextua::Imm& w) {
  std::vector<contextua::RationalMatrix> out;
  for (const auto& b : w.blocks()) {
    contextua::RationalMatrix m(static_cast<std::size_t>(b.rows()), static_cast<std::size_t>(b.cols()));
    for (Eigen::Index r = 0; r < b.rows(); ++r)
      for (Eigen::Index c = 0; c < b.cols(); ++c)
        m(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = contextua::exact_from_double(b(r, c));
    out.push_back(std::move(m));
  }
  return out;
}

inline contextua::MarginalScenario triangle() {
  return contextua::MarginalScenario({{"A", {1, -1}}, {"B", {1, -1}}, {"C", {1, -1}}},
                                     {{"A", "B"}, {"B", "C"}, {"C", "A"}});
}

inline contextua::MarginalScenario single_observable() {
  return contextua::MarginalScenario({{"A", {1, -1}}}, {{"A"}});
}

}  // namespace testing
