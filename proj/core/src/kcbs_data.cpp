#include "contextua/kcbs_data.hpp"

#include <array>
#include <string_view>

namespace contextua::kcbs {

namespace {

RationalVector parse_row(std::initializer_list<std::string_view> cells) {
  RationalVector v;
  v.reserve(cells.size());
  for (auto c : cells) v.push_back(parse_rational(c));
  return v;
}

RationalVector ints(std::initializer_list<int> xs) {
  RationalVector v;
  for (int x : xs) v.emplace_back(x);
  return v;
}

}  // namespace

MarginalScenario scenario() {
  std::vector<Observable> obs;
  for (int i = 1; i <= 5; ++i) obs.push_back({"A" + std::to_string(i), {1, -1}});
  return MarginalScenario(std::move(obs), {{"A1", "A2"}, {"A2", "A3"}, {"A3", "A4"}, {"A4", "A5"}, {"A5", "A1"}});
}

AffineEmbedding embedding() {
  const std::vector<RationalVector> m_rows = {
      ints({1, 0, 0, 0, 0, 0, 0, 0, 0, 0}),    ints({0, 1, 0, 0, 0, 0, 0, 0, 0, 0}),
      ints({-1, 0, 1, 1, 0, 0, 0, 0, 0, 0}),   ints({0, -1, -1, -1, 0, 0, 0, 0, 0, 0}),
      ints({0, 0, 1, 0, 0, 0, 0, 0, 0, 0}),    ints({0, 0, 0, 1, 0, 0, 0, 0, 0, 0}),
      ints({0, 0, -1, 0, 1, 1, 0, 0, 0, 0}),   ints({0, 0, 0, -1, -1, -1, 0, 0, 0, 0}),
      ints({0, 0, 0, 0, 1, 0, 0, 0, 0, 0}),    ints({0, 0, 0, 0, 0, 1, 0, 0, 0, 0}),
      ints({0, 0, 0, 0, -1, 0, 1, 1, 0, 0}),   ints({0, 0, 0, 0, 0, -1, -1, -1, 0, 0}),
      ints({0, 0, 0, 0, 0, 0, 1, 0, 0, 0}),    ints({0, 0, 0, 0, 0, 0, 0, 1, 0, 0}),
      ints({0, 0, 0, 0, 0, 0, -1, 0, 1, 1}),   ints({0, 0, 0, 0, 0, 0, 0, -1, -1, -1}),
      ints({0, 0, 0, 0, 0, 0, 0, 0, 1, 0}),    ints({0, 0, 0, 0, 0, 0, 0, 0, 0, 1}),
      ints({1, 1, 0, 0, 0, 0, 0, 0, -1, 0}),   ints({-1, -1, 0, 0, 0, 0, 0, 0, 0, -1}),
  };
  const RationalVector v = ints({0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1});
  return AffineEmbedding(RationalMatrix::from_rows(m_rows), v, {0, 1, 4, 5, 8, 9, 12, 13, 16, 17});
}

std::vector<RationalVector> nc_vertices() {
  return {
      ints({1, 0, 1, 0, 1, 0, 1, 0, 1, 0}), ints({1, 0, 1, 0, 1, 0, 0, 1, 0, 0}),
      ints({1, 0, 1, 0, 0, 1, 0, 0, 1, 0}), ints({1, 0, 1, 0, 0, 1, 0, 0, 0, 0}),
      ints({1, 0, 0, 1, 0, 0, 1, 0, 1, 0}), ints({1, 0, 0, 1, 0, 0, 0, 1, 0, 0}),
      ints({1, 0, 0, 1, 0, 0, 0, 0, 1, 0}), ints({1, 0, 0, 1, 0, 0, 0, 0, 0, 0}),
      ints({0, 1, 0, 0, 1, 0, 1, 0, 1, 0}), ints({0, 1, 0, 0, 1, 0, 0, 1, 0, 0}),
      ints({0, 1, 0, 0, 0, 1, 0, 0, 1, 0}), ints({0, 1, 0, 0, 0, 1, 0, 0, 0, 0}),
      ints({0, 1, 0, 0, 0, 0, 1, 0, 1, 0}), ints({0, 1, 0, 0, 0, 0, 0, 1, 0, 0}),
      ints({0, 1, 0, 0, 0, 0, 0, 0, 1, 0}), ints({0, 1, 0, 0, 0, 0, 0, 0, 0, 0}),
      ints({0, 0, 1, 0, 1, 0, 1, 0, 0, 1}), ints({0, 0, 1, 0, 1, 0, 0, 1, 0, 0}),
      ints({0, 0, 1, 0, 0, 1, 0, 0, 0, 1}), ints({0, 0, 1, 0, 0, 1, 0, 0, 0, 0}),
      ints({0, 0, 0, 1, 0, 0, 1, 0, 0, 1}), ints({0, 0, 0, 1, 0, 0, 0, 1, 0, 0}),
      ints({0, 0, 0, 1, 0, 0, 0, 0, 0, 1}), ints({0, 0, 0, 1, 0, 0, 0, 0, 0, 0}),
      ints({0, 0, 0, 0, 1, 0, 1, 0, 0, 1}), ints({0, 0, 0, 0, 1, 0, 0, 1, 0, 0}),
      ints({0, 0, 0, 0, 0, 1, 0, 0, 0, 1}), ints({0, 0, 0, 0, 0, 1, 0, 0, 0, 0}),
      ints({0, 0, 0, 0, 0, 0, 1, 0, 0, 1}), ints({0, 0, 0, 0, 0, 0, 0, 1, 0, 0}),
      ints({0, 0, 0, 0, 0, 0, 0, 0, 0, 1}), ints({0, 0, 0, 0, 0, 0, 0, 0, 0, 0}),
  };
}

std::vector<RationalVector> facet_normals() {
  return {
      ints({0, 1, 0, 1, 0, 1, 0, 1, 0, 1}),       ints({-1, 0, 0, 1, 0, 1, 1, 0, 0, -1}),
      ints({-1, 0, 0, 1, 1, 0, -1, 0, 1, 0}),     ints({0, 1, 0, 1, 1, 0, 0, -1, -1, 0}),
      ints({-1, 0, 1, 0, -1, 0, 0, 1, 1, 0}),     ints({0, 1, 1, 0, -1, 0, 1, 0, -1, 0}),
      ints({0, 1, 1, 0, 0, -1, -1, 0, 0, 1}),     ints({0, -1, -1, 0, 0, 1, 0, 1, 1, 0}),
      ints({1, 0, -1, 0, 0, 1, 1, 0, -1, 0}),     ints({1, 0, -1, 0, 1, 0, -1, 0, 0, 1}),
      ints({1, 0, 0, -1, -1, 0, 0, 1, 0, 1}),     ints({-1, 0, 1, 0, 0, -1, 0, -1, 0, -1}),
      ints({0, -1, -1, 0, 1, 0, 0, -1, 0, -1}),   ints({0, -1, 0, -1, -1, 0, 1, 0, 0, -1}),
      ints({0, -1, 0, -1, 0, -1, -1, 0, 1, 0}),   ints({1, 0, 0, -1, 0, -1, 0, -1, -1, 0}),
  };
}

RationalVector facet_bounds() { return ints({2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0}); }

std::vector<RationalVector> nd_vertices() {
  auto out = nc_vertices();
  const std::vector<RationalVector> extra = {
      parse_row({"0", "1/2", "1/2", "0", "1/2", "0", "1/2", "0", "1/2", "0"}),
      parse_row({"1/2", "0", "0", "1/2", "1/2", "0", "1/2", "0", "1/2", "0"}),
      parse_row({"1/2", "0", "1/2", "0", "0", "1/2", "1/2", "0", "1/2", "0"}),
      parse_row({"1/2", "0", "1/2", "0", "1/2", "0", "0", "1/2", "1/2", "0"}),
      parse_row({"1/2", "0", "1/2", "0", "1/2", "0", "1/2", "0", "0", "1/2"}),
      parse_row({"0", "1/2", "0", "1/2", "0", "1/2", "1/2", "0", "1/2", "0"}),
      parse_row({"0", "1/2", "0", "1/2", "1/2", "0", "0", "1/2", "1/2", "0"}),
      parse_row({"0", "1/2", "0", "1/2", "1/2", "0", "1/2", "0", "0", "1/2"}),
      parse_row({"0", "1/2", "1/2", "0", "1/2", "0", "0", "1/2", "0", "1/2"}),
      parse_row({"0", "1/2", "1/2", "0", "0", "1/2", "0", "1/2", "1/2", "0"}),
      parse_row({"1/2", "0", "0", "1/2", "0", "1/2", "0", "1/2", "1/2", "0"}),
      parse_row({"1/2", "0", "0", "1/2", "0", "1/2", "1/2", "0", "0", "1/2"}),
      parse_row({"1/2", "0", "1/2", "0", "0", "1/2", "0", "1/2", "0", "1/2"}),
      parse_row({"1/2", "0", "0", "1/2", "1/2", "0", "0", "1/2", "0", "1/2"}),
      parse_row({"0", "1/2", "1/2", "0", "0", "1/2", "1/2", "0", "0", "1/2"}),
      parse_row({"0", "1/2", "0", "1/2", "0", "1/2", "0", "1/2", "0", "1/2"}),
  };
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

std::vector<RationalMatrix> transport_1_to_48_blocks() {
  using Block = std::array<std::array<std::string_view, 4>, 4>;
  const std::array<Block, 5> blocks = {{
      {{{"1", "1/2", "1", "0"}, {"0", "1/2", "0", "1/2"}, {"0", "0", "0", "1/2"}, {"0", "0", "0", "0"}}},
      {{{"1", "1/2", "1/2", "1/2"}, {"0", "1/2", "0", "0"}, {"0", "0", "1/2", "0"}, {"0", "0", "0", "1/2"}}},
      {{{"1", "1", "1/2", "0"}, {"0", "0", "0", "1/2"}, {"0", "0", "1/2", "1/2"}, {"0", "0", "0", "0"}}},
      {{{"1", "1", "1", "1/2"}, {"0", "0", "0", "0"}, {"0", "0", "0", "1/2"}, {"0", "0", "0", "0"}}},
      {{{"1", "1", "1", "0"}, {"0", "0", "0", "1/2"}, {"0", "0", "0", "1/2"}, {"0", "0", "0", "0"}}},
  }};
  std::vector<RationalMatrix> out;
  for (const auto& b : blocks) {
    RationalMatrix m(4, 4);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c) m(r, c) = parse_rational(b[r][c]);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace contextua::kcbs
