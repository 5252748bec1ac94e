#include "wavecone/subspace.hpp"

#include <stdexcept>

namespace wavecone {

Subspace Subspace::full(int ambient_dim) {
  Subspace s(ambient_dim);
  s.basis_ = RationalMatrix::identity(ambient_dim);
  return s;
}

Subspace Subspace::span_of(int ambient_dim, const std::vector<RationalVector>& vectors) {
  for (const auto& v : vectors)
    if (static_cast<int>(v.size()) != ambient_dim) throw std::invalid_argument("spanning vector has wrong length");
  Subspace s(ambient_dim);
  if (vectors.empty()) return s;
  RationalMatrix m = RationalMatrix::from_rows(vectors);
  int r = rref_in_place(m);
  RationalMatrix basis(r, ambient_dim);
  for (int i = 0; i < r; ++i)
    for (int c = 0; c < ambient_dim; ++c) basis.at(i, c) = m.at(i, c);
  s.basis_ = std::move(basis);
  return s;
}

bool Subspace::contains(const RationalVector& v) const {
  if (static_cast<int>(v.size()) != ambient_) throw std::invalid_argument("vector has wrong length");
  RationalVector w = v;
  // Reduce against RREF rows: each row's pivot entry is 1.
  for (int r = 0; r < basis_.rows(); ++r) {
    int piv = -1;
    for (int c = 0; c < ambient_; ++c)
      if (basis_.at(r, c) != 0) { piv = c; break; }
    if (piv < 0) continue;
    if (w[piv] == 0) continue;
    Rational f = w[piv];
    for (int c = piv; c < ambient_; ++c) w[c] -= f * basis_.at(r, c);
  }
  return is_zero_vector(w);
}

Subspace Subspace::orthogonal_complement() const {
  if (dim() == 0) return full(ambient_);
  return span_of(ambient_, nullspace_rows(basis_));
}

Subspace Subspace::sum(const Subspace& other) const {
  if (other.ambient_ != ambient_) throw std::invalid_argument("ambient dimension mismatch");
  std::vector<RationalVector> rows = basis_.row_vectors();
  for (const auto& r : other.basis_.row_vectors()) rows.push_back(r);
  return span_of(ambient_, rows);
}

nlohmann::json Subspace::to_json() const {
  nlohmann::json basis = nlohmann::json::array();
  for (int r = 0; r < basis_.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < ambient_; ++c) row.push_back(to_string(basis_.at(r, c)));
    basis.push_back(row);
  }
  return {{"ambient_dim", ambient_}, {"dim", dim()}, {"basis", basis}};
}

Subspace Subspace::from_json(const nlohmann::json& j) {
  int ambient = j.at("ambient_dim").get<int>();
  std::vector<RationalVector> rows;
  for (const auto& jr : j.at("basis")) {
    RationalVector row;
    for (const auto& je : jr) row.push_back(parse_rational(je.get<std::string>()));
    rows.push_back(std::move(row));
  }
  return span_of(ambient, rows);
}

}  // namespace wavecone
