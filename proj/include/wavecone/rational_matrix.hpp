#pragma once

#include "wavecone/rational.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace wavecone {

// Dense row-major matrix of exact rationals.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}

  static RationalMatrix identity(int n);
  static RationalMatrix from_rows(const std::vector<RationalVector>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Rational& at(int r, int c) { return a_[static_cast<std::size_t>(r) * cols_ + c]; }
  const Rational& at(int r, int c) const { return a_[static_cast<std::size_t>(r) * cols_ + c]; }

  RationalVector row(int r) const;
  std::vector<RationalVector> row_vectors() const;

  RationalMatrix transposed() const;
  RationalVector apply(const RationalVector& x) const;  // this * x
  bool is_zero() const;

  bool operator==(const RationalMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Rational> a_;
};

/// In-place reduced row echelon form (pivots scaled to 1, eliminated above and
/// below). Returns the rank; pivot column indices go to *pivot_cols if given.
int rref_in_place(RationalMatrix& m, std::vector<int>* pivot_cols = nullptr);

int rank(const RationalMatrix& m);

/// Rows spanning the kernel {x : m x = 0}, built from the RREF free columns.
std::vector<RationalVector> nullspace_rows(const RationalMatrix& m);

/// Exact rank of a small row-major int64 matrix via fraction-free (Bareiss)
/// elimination. Returns nullopt if an intermediate value would overflow; the
/// caller then falls back to the rational path.
std::optional<int> int64_rank(std::span<const std::int64_t> a, int rows, int cols);

}  // namespace wavecone
