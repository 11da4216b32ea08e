#include "contextua/rational.hpp"

#include <cctype>
#include <cmath>
#include <numeric>

#include "contextua/errors.hpp"

namespace contextua {

namespace {

using boost::multiprecision::cpp_int;

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

// cpp_int's string constructor reads a leading 0 as an octal prefix.
cpp_int decimal(std::string_view digits) {
  const auto nz = digits.find_first_not_of('0');
  return nz == std::string_view::npos ? cpp_int(0) : cpp_int{std::string(digits.substr(nz))};
}

cpp_int parse_integer(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw InvalidInput("not an integer: '" + std::string(s) + "'");
  cpp_int v = decimal(s);
  return neg ? cpp_int(-v) : v;
}

cpp_int pow10(long e) {
  cpp_int r = 1;
  for (long i = 0; i < e; ++i) r *= 10;
  return r;
}

Rational parse_decimal(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    cpp_int ev = parse_integer(s.substr(e + 1));
    exponent = static_cast<long>(ev);
    s = s.substr(0, e);
  }
  std::string digits;
  long frac = 0;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto ip = s.substr(0, dot);
    auto fp = s.substr(dot + 1);
    if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) ||
        (ip.empty() && fp.empty())) {
      throw InvalidInput("malformed number");
    }
    digits = std::string(ip) + std::string(fp);
    frac = static_cast<long>(fp.size());
  } else {
    if (!all_digits(s)) throw InvalidInput("malformed number");
    digits = std::string(s);
  }
  Rational r{decimal(digits)};
  long scale = exponent - frac;
  if (scale > 0) r *= Rational(pow10(scale));
  if (scale < 0) r /= Rational(pow10(-scale));
  return neg ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw InvalidInput("empty rational literal");
  try {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      cpp_int num = parse_integer(text.substr(0, slash));
      cpp_int den = parse_integer(text.substr(slash + 1));
      if (den == 0) throw InvalidInput("zero denominator");
      return Rational(num, den);
    }
    return parse_decimal(text);
  } catch (const InvalidInput& e) {
    throw InvalidInput("bad rational literal '" + std::string(text) + "': " + e.what());
  }
}

std::string to_string(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational exact_from_double(double x) {
  if (!std::isfinite(x)) throw InvalidInput("non-finite value has no rational form");
  int exp = 0;
  double mant = std::frexp(x, &exp);
  // 53-bit mantissa scaled to an integer.
  auto m = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r{cpp_int(m)};
  cpp_int p = 1;
  p <<= std::abs(exp);
  if (exp >= 0) {
    r *= Rational(p);
  } else {
    r /= Rational(p);
  }
  return r;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::from_rows(const std::vector<RationalVector>& rows) {
  if (rows.empty()) return {};
  RationalMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw InvalidInput("ragged rational matrix");
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

RationalVector RationalMatrix::row(std::size_t r) const {
  return RationalVector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                        data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

RationalVector RationalMatrix::col(std::size_t c) const {
  RationalVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Eigen::MatrixXd RationalMatrix::to_eigen() const {
  Eigen::MatrixXd m(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = to_double((*this)(r, c));
  return m;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidInput("rational matrix product: dimension mismatch");
  RationalMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Rational& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        if (b(k, j) != 0) out(i, j) += aik * b(k, j);
      }
    }
  }
  return out;
}

RationalVector operator*(const RationalMatrix& a, const RationalVector& x) {
  if (a.cols() != x.size()) throw InvalidInput("rational matrix-vector product: dimension mismatch");
  RationalVector out(a.rows(), Rational(0));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      if (a(i, k) != 0 && x[k] != 0) out[i] += a(i, k) * x[k];
  return out;
}

Eigen::VectorXd to_eigen(const RationalVector& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = to_double(v[i]);
  return out;
}

RationalVector operator+(const RationalVector& a, const RationalVector& b) {
  if (a.size() != b.size()) throw InvalidInput("vector sum: dimension mismatch");
  RationalVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

RationalVector operator-(const RationalVector& a, const RationalVector& b) {
  if (a.size() != b.size()) throw InvalidInput("vector difference: dimension mismatch");
  RationalVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

RowEchelon row_reduce(const RationalMatrix& a, const RationalVector& b,
                      const std::vector<std::size_t>& column_order) {
  if (b.size() != a.rows()) throw InvalidInput("row_reduce: rhs size mismatch");
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  std::vector<std::size_t> order = column_order;
  if (order.empty()) {
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
  }
  if (order.size() != n) throw InvalidInput("row_reduce: column order must cover every column");

  RationalMatrix w = a;
  RationalVector rhs = b;
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c : order) {
    if (r == m) break;
    std::size_t p = r;
    while (p < m && w(p, c) == 0) ++p;
    if (p == m) continue;
    if (p != r) {
      for (std::size_t j = 0; j < n; ++j) std::swap(w(p, j), w(r, j));
      std::swap(rhs[p], rhs[r]);
    }
    const Rational inv = 1 / w(r, c);
    for (std::size_t j = 0; j < n; ++j)
      if (w(r, j) != 0) w(r, j) *= inv;
    rhs[r] *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || w(i, c) == 0) continue;
      const Rational f = w(i, c);
      for (std::size_t j = 0; j < n; ++j)
        if (w(r, j) != 0) w(i, j) -= f * w(r, j);
      rhs[i] -= f * rhs[r];
    }
    pivots.push_back(c);
    ++r;
  }

  RowEchelon out;
  out.pivots = pivots;
  out.reduced = RationalMatrix(r, n);
  out.rhs.assign(r, Rational(0));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.reduced(i, j) = w(i, j);
    out.rhs[i] = rhs[i];
  }
  for (std::size_t i = r; i < m; ++i) {
    if (rhs[i] != 0) out.consistent = false;
  }
  return out;
}

std::size_t rank(const RationalMatrix& a) {
  return row_reduce(a, RationalVector(a.rows(), Rational(0))).rank();
}

RationalMatrix inverse(const RationalMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidInput("inverse: matrix is not square");
  const std::size_t n = a.rows();
  RationalMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1;
  }
  const auto ech = row_reduce(aug, RationalVector(n, Rational(0)));
  if (ech.rank() < n || ech.pivots[n - 1] >= n) throw InvalidInput("inverse: matrix is singular");
  RationalMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = ech.reduced(i, n + j);
  return inv;
}

NullSpace null_space(const RationalMatrix& a) {
  const auto ech = row_reduce(a, RationalVector(a.rows(), Rational(0)));
  const std::size_t n = a.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto p : ech.pivots) is_pivot[p] = true;
  NullSpace ns;
  ns.pivot_cols = ech.pivots;
  for (std::size_t c = 0; c < n; ++c)
    if (!is_pivot[c]) ns.free_cols.push_back(c);
  ns.basis = RationalMatrix(n, ns.free_cols.size());
  for (std::size_t k = 0; k < ns.free_cols.size(); ++k) {
    const std::size_t f = ns.free_cols[k];
    ns.basis(f, k) = 1;
    for (std::size_t i = 0; i < ech.rank(); ++i) ns.basis(ech.pivots[i], k) = -ech.reduced(i, f);
  }
  return ns;
}

}  // namespace contextua
