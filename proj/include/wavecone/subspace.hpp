#pragma once

#include "wavecone/rational_matrix.hpp"

#include "json.hpp"

namespace wavecone {

// Linear subspace of R^d with an exact reduced-row-echelon basis. The RREF
// basis is unique, so equal subspaces compare equal entry-wise.
class Subspace {
 public:
  explicit Subspace(int ambient_dim) : ambient_(ambient_dim) {}

  static Subspace zero(int ambient_dim) { return Subspace(ambient_dim); }
  static Subspace full(int ambient_dim);
  static Subspace span_of(int ambient_dim, const std::vector<RationalVector>& vectors);

  int ambient_dim() const { return ambient_; }
  int dim() const { return basis_.rows(); }
  const RationalMatrix& basis() const { return basis_; }
  RationalVector basis_row(int i) const { return basis_.row(i); }

  bool contains(const RationalVector& v) const;
  Subspace orthogonal_complement() const;
  Subspace sum(const Subspace& other) const;

  bool operator==(const Subspace& o) const { return ambient_ == o.ambient_ && basis_ == o.basis_; }

  nlohmann::json to_json() const;
  static Subspace from_json(const nlohmann::json& j);

 private:
  int ambient_ = 0;
  RationalMatrix basis_;  // RREF rows, no zero rows
};

}  // namespace wavecone
