#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace contextua {

using Rational = boost::multiprecision::cpp_rational;
using RationalVector = std::vector<Rational>;

/// Parses "p", "p/q" or a finite decimal literal ("0.25", "-1e-3") exactly.
Rational parse_rational(std::string_view text);
/// "p/q" in lowest terms, or "p" when the denominator is 1.
std::string to_string(const Rational& r);
/// Exact value of a finite double (every double is a dyadic rational).
Rational exact_from_double(double x);
double to_double(const Rational& r);

/// Dense row-major matrix over the rationals. Sizes here stay in the
/// hundreds, so no sparse storage.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(std::size_t rows, std::size_t cols);

  static RationalMatrix identity(std::size_t n);
  static RationalMatrix from_rows(const std::vector<RationalVector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  RationalVector row(std::size_t r) const;
  RationalVector col(std::size_t c) const;
  RationalMatrix transpose() const;

  Eigen::MatrixXd to_eigen() const;

  friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
  friend RationalVector operator*(const RationalMatrix& a, const RationalVector& x);
  friend bool operator==(const RationalMatrix& a, const RationalMatrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

Eigen::VectorXd to_eigen(const RationalVector& v);
RationalVector operator+(const RationalVector& a, const RationalVector& b);
RationalVector operator-(const RationalVector& a, const RationalVector& b);

/// Reduced row echelon form of the augmented system [A | b].
struct RowEchelon {
  RationalMatrix reduced;           ///< nonzero rows of rref(A), rank x cols
  RationalVector rhs;               ///< matching right-hand sides
  std::vector<std::size_t> pivots;  ///< pivot column of each row
  bool consistent = true;           ///< false if some 0 = c != 0 row appeared
  std::size_t rank() const { return pivots.size(); }
};

/// Exact Gauss-Jordan elimination. `column_order`, when non-empty, is the
/// order in which columns are scanned for pivots; pivot selection is
/// otherwise by ascending column index.
RowEchelon row_reduce(const RationalMatrix& a, const RationalVector& b,
                      const std::vector<std::size_t>& column_order = {});

std::size_t rank(const RationalMatrix& a);

/// Exact inverse; throws InvalidInput when `a` is singular or not square.
RationalMatrix inverse(const RationalMatrix& a);

/// Columns form a basis of {x : A x = 0}; each basis vector has a 1 at one
/// free column and 0 at the other free columns.
struct NullSpace {
  RationalMatrix basis;                 ///< cols(A) x nullity
  std::vector<std::size_t> free_cols;   ///< free column for each basis vector
  std::vector<std::size_t> pivot_cols;
};
NullSpace null_space(const RationalMatrix& a);

}  // namespace contextua
