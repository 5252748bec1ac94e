#include "wavecone/rational_matrix.hpp"

#include <stdexcept>

namespace wavecone {

RationalMatrix RationalMatrix::identity(int n) {
  RationalMatrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

RationalMatrix RationalMatrix::from_rows(const std::vector<RationalVector>& rows) {
  if (rows.empty()) return RationalMatrix(0, 0);
  RationalMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw std::invalid_argument("ragged rows");
    for (std::size_t c = 0; c < rows[r].size(); ++c) m.at(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
  }
  return m;
}

RationalVector RationalMatrix::row(int r) const {
  RationalVector v(cols_);
  for (int c = 0; c < cols_; ++c) v[c] = at(r, c);
  return v;
}

std::vector<RationalVector> RationalMatrix::row_vectors() const {
  std::vector<RationalVector> out;
  out.reserve(rows_);
  for (int r = 0; r < rows_; ++r) out.push_back(row(r));
  return out;
}

RationalMatrix RationalMatrix::transposed() const {
  RationalMatrix t(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
  return t;
}

RationalVector RationalMatrix::apply(const RationalVector& x) const {
  if (static_cast<int>(x.size()) != cols_) throw std::invalid_argument("matrix-vector size mismatch");
  RationalVector y(rows_);
  for (int r = 0; r < rows_; ++r) {
    Rational acc = 0;
    for (int c = 0; c < cols_; ++c)
      if (at(r, c) != 0 && x[c] != 0) acc += at(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

bool RationalMatrix::is_zero() const {
  for (const auto& v : a_)
    if (v != 0) return false;
  return true;
}

int rref_in_place(RationalMatrix& m, std::vector<int>* pivot_cols) {
  if (pivot_cols) pivot_cols->clear();
  int r = 0;
  for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
    int piv = -1;
    for (int i = r; i < m.rows(); ++i)
      if (m.at(i, c) != 0) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != r)
      for (int j = 0; j < m.cols(); ++j) std::swap(m.at(piv, j), m.at(r, j));
    Rational inv = m.at(r, c);
    for (int j = c; j < m.cols(); ++j) m.at(r, j) /= inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == r || m.at(i, c) == 0) continue;
      Rational f = m.at(i, c);
      for (int j = c; j < m.cols(); ++j) m.at(i, j) -= f * m.at(r, j);
    }
    if (pivot_cols) pivot_cols->push_back(c);
    ++r;
  }
  return r;
}

int rank(const RationalMatrix& m) {
  RationalMatrix copy = m;
  return rref_in_place(copy);
}

std::vector<RationalVector> nullspace_rows(const RationalMatrix& m) {
  RationalMatrix red = m;
  std::vector<int> pivots;
  rref_in_place(red, &pivots);
  std::vector<bool> is_pivot(m.cols(), false);
  for (int c : pivots) is_pivot[c] = true;

  std::vector<RationalVector> basis;
  for (int f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    RationalVector v(m.cols());
    v[f] = 1;
    for (std::size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -red.at(static_cast<int>(k), f);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<int> int64_rank(std::span<const std::int64_t> a, int rows, int cols) {
  constexpr std::int64_t kMax = INT64_MAX / 2;
  std::vector<std::int64_t> w(a.begin(), a.end());
  auto at = [&](int r, int c) -> std::int64_t& { return w[static_cast<std::size_t>(r) * cols + c]; };
  std::int64_t prev = 1;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (at(i, c) != 0) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != r)
      for (int j = 0; j < cols; ++j) std::swap(at(piv, j), at(r, j));
    for (int i = r + 1; i < rows; ++i) {
      for (int j = c + 1; j < cols; ++j) {
        __int128 num = static_cast<__int128>(at(r, c)) * at(i, j) - static_cast<__int128>(at(i, c)) * at(r, j);
        __int128 q = num / prev;  // exact in Bareiss elimination
        if (q > kMax || q < -kMax) return std::nullopt;
        at(i, j) = static_cast<std::int64_t>(q);
      }
      at(i, c) = 0;
    }
    prev = at(r, c);
    ++r;
  }
  return r;
}

}  // namespace wavecone
