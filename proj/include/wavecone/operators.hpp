#pragma once

#include "wavecone/multivector.hpp"
#include "wavecone/subspace.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace wavecone {

// E is a tensor product R^rows (x) R^cols; candidates a (x) b are worth trying.
struct TensorStructure {
  int rows = 0, cols = 0;
};

// E is an exterior power Lambda^m / Lambda_m of R^d.
struct ExteriorStructure {
  int d = 0, m = 0;
  Variance variance = Variance::covector;
};

using EStructure = std::variant<std::monostate, TensorStructure, ExteriorStructure>;

// First-order constant-coefficient operator sum_i P_i d_i + P_0 acting on
// E-valued measures with values in F. Only the principal part enters any
// symbol computation; P_0 is carried for the inhomogeneous lift.
class FirstOrderOperator {
 public:
  FirstOrderOperator(int d, int dimE, int dimF, RationalMatrix P0, std::vector<RationalMatrix> P,
                     std::string label = {}, EStructure structure = {},
                     std::optional<int> analytic_ell = std::nullopt);

  int d() const { return d_; }
  int dimE() const { return dimE_; }
  int dimF() const { return dimF_; }
  const RationalMatrix& P0() const { return P0_; }
  const RationalMatrix& P(int i) const { return P_[i]; }  // i in 0..d-1
  const std::string& label() const { return label_; }
  const EStructure& structure() const { return structure_; }
  std::optional<int> analytic_ell() const { return analytic_ell_; }

  /// Principal-part coefficient matrices scaled to integers by the common
  /// denominator (rank-preserving); cached for the lattice scans.
  const std::vector<std::vector<std::int64_t>>& integer_principal() const;

  nlohmann::json to_json() const;
  static FirstOrderOperator from_json(const nlohmann::json& j);

 private:
  int d_, dimE_, dimF_;
  RationalMatrix P0_;
  std::vector<RationalMatrix> P_;
  std::string label_;
  EStructure structure_;
  std::optional<int> analytic_ell_;
  mutable std::vector<std::vector<std::int64_t>> int_principal_;  // lazy
  mutable bool int_principal_ok_ = false;
};

/// P(xi) = sum_i xi_i P_i.
RationalMatrix principal_symbol(const FirstOrderOperator& op, const RationalVector& xi);

// The dimF x d matrix M(e) with columns P_i e; satisfies P(xi) e = M(e) xi.
struct SymbolMatrix {
  RationalVector e;
  RationalMatrix M;
};

SymbolMatrix symbol_matrix(const FirstOrderOperator& op, const RationalVector& e);

/// {xi : P(xi) e = 0}, the exact null space of M(e).
Subspace kernel_directions(const FirstOrderOperator& op, const RationalVector& e);

/// Orthogonal complement of the kernel directions = row space of M(e).
Subspace invariance_space(const FirstOrderOperator& op, const RationalVector& e);

struct WaveConeReport {
  RationalVector e;
  bool member = false;
  std::optional<RationalVector> kernel_direction;
};

/// e is in the wave cone iff some xi != 0 has P(xi) e = 0, i.e. rank M(e) < d.
WaveConeReport wave_cone_member(const FirstOrderOperator& op, const RationalVector& e);

/// Operator on E x F absorbing an arbitrary right-hand side: P~_i = [P_i | 0],
/// P~_0 = [P_0 | -Id_F].
FirstOrderOperator lift_inhomogeneous(const FirstOrderOperator& op);

// Gallery: the four operators with paper-stated invariants.
FirstOrderOperator make_curl(int d, int m);             // rows of gradients, ell = d-1
FirstOrderOperator make_div(int k, int d);              // row-wise divergence, ell = 1
FirstOrderOperator make_ext_derivative(int d, int m);   // d on m-forms, ell = d-m
FirstOrderOperator make_boundary(int d, int m);         // boundary on m-vector fields, ell = m

}  // namespace wavecone
