#include "wavecone/operators.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace wavecone {

namespace {

void check_e(const FirstOrderOperator& op, const RationalVector& e) {
  if (static_cast<int>(e.size()) != op.dimE()) throw std::invalid_argument("e has wrong length");
  if (is_zero_vector(e)) throw std::invalid_argument("e must be nonzero");
}

}  // namespace

FirstOrderOperator::FirstOrderOperator(int d, int dimE, int dimF, RationalMatrix P0,
                                       std::vector<RationalMatrix> P, std::string label,
                                       EStructure structure, std::optional<int> analytic_ell)
    : d_(d),
      dimE_(dimE),
      dimF_(dimF),
      P0_(std::move(P0)),
      P_(std::move(P)),
      label_(std::move(label)),
      structure_(structure),
      analytic_ell_(analytic_ell) {
  if (d_ < 1 || dimE_ < 1 || dimF_ < 1) throw std::invalid_argument("dimensions must be positive");
  if (static_cast<int>(P_.size()) != d_) throw std::invalid_argument("need exactly d coefficient matrices");
  if (P0_.rows() != dimF_ || P0_.cols() != dimE_) throw std::invalid_argument("P0 has wrong shape");
  bool any = false;
  for (const auto& m : P_) {
    if (m.rows() != dimF_ || m.cols() != dimE_) throw std::invalid_argument("P_i has wrong shape");
    any = any || !m.is_zero();
  }
  if (!any) throw std::invalid_argument("principal part vanishes");
}

const std::vector<std::vector<std::int64_t>>& FirstOrderOperator::integer_principal() const {
  if (!int_principal_ok_) {
    BigInt lcm = 1;
    for (const auto& m : P_)
      for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) {
          BigInt den = denominator(m.at(r, c));
          lcm = lcm / gcd(lcm, den) * den;
        }
    int_principal_.assign(d_, std::vector<std::int64_t>(static_cast<std::size_t>(dimF_) * dimE_, 0));
    for (int i = 0; i < d_; ++i)
      for (int r = 0; r < dimF_; ++r)
        for (int c = 0; c < dimE_; ++c) {
          Rational scaled = P_[i].at(r, c) * lcm;
          BigInt num = numerator(scaled);
          if (num > INT64_MAX / 4 || num < INT64_MIN / 4)
            throw std::runtime_error("operator coefficients too large for the integer fast path");
          int_principal_[i][static_cast<std::size_t>(r) * dimE_ + c] = num.convert_to<std::int64_t>();
        }
    int_principal_ok_ = true;
  }
  return int_principal_;
}

RationalMatrix principal_symbol(const FirstOrderOperator& op, const RationalVector& xi) {
  if (static_cast<int>(xi.size()) != op.d()) throw std::invalid_argument("xi has wrong length");
  RationalMatrix m(op.dimF(), op.dimE());
  for (int i = 0; i < op.d(); ++i) {
    if (xi[i] == 0) continue;
    for (int r = 0; r < op.dimF(); ++r)
      for (int c = 0; c < op.dimE(); ++c) m.at(r, c) += xi[i] * op.P(i).at(r, c);
  }
  return m;
}

SymbolMatrix symbol_matrix(const FirstOrderOperator& op, const RationalVector& e) {
  check_e(op, e);
  RationalMatrix m(op.dimF(), op.d());
  for (int i = 0; i < op.d(); ++i) {
    RationalVector col = op.P(i).apply(e);
    for (int r = 0; r < op.dimF(); ++r) m.at(r, i) = col[r];
  }
  return {e, std::move(m)};
}

Subspace kernel_directions(const FirstOrderOperator& op, const RationalVector& e) {
  return Subspace::span_of(op.d(), nullspace_rows(symbol_matrix(op, e).M));
}

Subspace invariance_space(const FirstOrderOperator& op, const RationalVector& e) {
  return Subspace::span_of(op.d(), symbol_matrix(op, e).M.row_vectors());
}

WaveConeReport wave_cone_member(const FirstOrderOperator& op, const RationalVector& e) {
  Subspace ker = kernel_directions(op, e);
  WaveConeReport rep;
  rep.e = e;
  rep.member = ker.dim() > 0;
  if (rep.member) rep.kernel_direction = ker.basis_row(0);
  return rep;
}

FirstOrderOperator lift_inhomogeneous(const FirstOrderOperator& op) {
  int dimE = op.dimE() + op.dimF();
  std::vector<RationalMatrix> P;
  for (int i = 0; i < op.d(); ++i) {
    RationalMatrix m(op.dimF(), dimE);
    for (int r = 0; r < op.dimF(); ++r)
      for (int c = 0; c < op.dimE(); ++c) m.at(r, c) = op.P(i).at(r, c);
    P.push_back(std::move(m));
  }
  RationalMatrix P0(op.dimF(), dimE);
  for (int r = 0; r < op.dimF(); ++r) {
    for (int c = 0; c < op.dimE(); ++c) P0.at(r, c) = op.P0().at(r, c);
    P0.at(r, op.dimE() + r) = -1;
  }
  return FirstOrderOperator(op.d(), dimE, op.dimF(), std::move(P0), std::move(P),
                            "lift(" + op.label() + ")");
}

FirstOrderOperator make_curl(int d, int m) {
  if (d < 2) throw std::invalid_argument("make_curl requires d >= 2");
  if (m < 1) throw std::invalid_argument("make_curl requires m >= 1");
  int pairs = d * (d - 1) / 2;
  int dimE = m * d;
  int dimF = m * pairs;
  std::vector<RationalMatrix> P(d, RationalMatrix(dimF, dimE));
  // Equation (k, i<j): d_i mu_{k j} - d_j mu_{k i}; e is row-major (k, j).
  int pair_index = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j, ++pair_index)
      for (int k = 0; k < m; ++k) {
        int row = k * pairs + pair_index;
        P[i].at(row, k * d + j) += 1;
        P[j].at(row, k * d + i) -= 1;
      }
  return FirstOrderOperator(d, dimE, dimF, RationalMatrix(dimF, dimE), std::move(P),
                            "curl(d=" + std::to_string(d) + ",m=" + std::to_string(m) + ")",
                            TensorStructure{m, d}, d - 1);
}

FirstOrderOperator make_div(int k, int d) {
  if (k < 1 || d < 1) throw std::invalid_argument("make_div requires k, d >= 1");
  int dimE = k * d;
  std::vector<RationalMatrix> P(d, RationalMatrix(k, dimE));
  // Equation j: sum_i d_i mu_{j i}; e is row-major (j, i).
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < d; ++i) P[i].at(j, j * d + i) = 1;
  return FirstOrderOperator(d, dimE, k, RationalMatrix(k, dimE), std::move(P),
                            "div(k=" + std::to_string(k) + ",d=" + std::to_string(d) + ")",
                            TensorStructure{k, d}, 1);
}

FirstOrderOperator make_ext_derivative(int d, int m) {
  if (m < 0 || m > d - 1) throw std::invalid_argument("make_ext_derivative requires 0 <= m <= d-1");
  auto src = basis_masks(d, m);
  auto dst = basis_masks(d, m + 1);
  auto dst_index = [&](std::uint64_t mask) {
    return static_cast<int>(std::find(dst.begin(), dst.end(), mask) - dst.begin());
  };
  int dimE = static_cast<int>(src.size());
  int dimF = static_cast<int>(dst.size());
  std::vector<RationalMatrix> P(d, RationalMatrix(dimF, dimE));
  for (int col = 0; col < dimE; ++col) {
    MultiVector v = MultiVector::basis_element(d, src[col], Variance::covector);
    for (int i = 0; i < d; ++i) {
      MultiVector img = wedge(MultiVector::basis_element(d, std::uint64_t(1) << i, Variance::covector), v);
      for (const auto& [mask, c] : img.terms()) P[i].at(dst_index(mask), col) = c;
    }
  }
  return FirstOrderOperator(d, dimE, dimF, RationalMatrix(dimF, dimE), std::move(P),
                            "ext_derivative(d=" + std::to_string(d) + ",m=" + std::to_string(m) + ")",
                            ExteriorStructure{d, m, Variance::covector}, d - m);
}

FirstOrderOperator make_boundary(int d, int m) {
  if (m < 1 || m > d) throw std::invalid_argument("make_boundary requires 1 <= m <= d");
  auto src = basis_masks(d, m);
  auto dst = basis_masks(d, m - 1);
  auto dst_index = [&](std::uint64_t mask) {
    return static_cast<int>(std::find(dst.begin(), dst.end(), mask) - dst.begin());
  };
  int dimE = static_cast<int>(src.size());
  int dimF = static_cast<int>(dst.size());
  std::vector<RationalMatrix> P(d, RationalMatrix(dimF, dimE));
  for (int col = 0; col < dimE; ++col) {
    MultiVector v = MultiVector::basis_element(d, src[col], Variance::vector);
    for (int i = 0; i < d; ++i) {
      MultiVector img = interior_mult(v, MultiVector::basis_element(d, std::uint64_t(1) << i, Variance::covector));
      for (const auto& [mask, c] : img.terms()) P[i].at(dst_index(mask), col) = c;
    }
  }
  return FirstOrderOperator(d, dimE, dimF, RationalMatrix(dimF, dimE), std::move(P),
                            "boundary(d=" + std::to_string(d) + ",m=" + std::to_string(m) + ")",
                            ExteriorStructure{d, m, Variance::vector}, m);
}

namespace {

nlohmann::json matrix_to_json(const RationalMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(to_string(m.at(r, c)));
    rows.push_back(row);
  }
  return rows;
}

RationalMatrix matrix_from_json(const nlohmann::json& j, int rows, int cols, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw std::invalid_argument(std::string("field '") + what + "' must have " + std::to_string(rows) + " rows");
  RationalMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto& jr = j[r];
    if (!jr.is_array() || static_cast<int>(jr.size()) != cols)
      throw std::invalid_argument(std::string("field '") + what + "' row " + std::to_string(r) + " must have " +
                                  std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c) {
      const auto& je = jr[c];
      m.at(r, c) = je.is_string() ? parse_rational(je.get<std::string>()) : Rational(je.get<long long>());
    }
  }
  return m;
}

}  // namespace

nlohmann::json FirstOrderOperator::to_json() const {
  nlohmann::json j{{"d", d_},      {"dimE", dimE_},          {"dimF", dimF_},
                   {"label", label_}, {"P0", matrix_to_json(P0_)}, {"P", nlohmann::json::array()}};
  for (const auto& m : P_) j["P"].push_back(matrix_to_json(m));
  if (std::holds_alternative<TensorStructure>(structure_)) {
    const auto& t = std::get<TensorStructure>(structure_);
    j["structure"] = {{"kind", "tensor"}, {"rows", t.rows}, {"cols", t.cols}};
  } else if (std::holds_alternative<ExteriorStructure>(structure_)) {
    const auto& x = std::get<ExteriorStructure>(structure_);
    j["structure"] = {{"kind", "exterior"},
                      {"d", x.d},
                      {"m", x.m},
                      {"variance", x.variance == Variance::vector ? "vector" : "covector"}};
  }
  if (analytic_ell_) j["analytic_ell"] = *analytic_ell_;
  return j;
}

FirstOrderOperator FirstOrderOperator::from_json(const nlohmann::json& j) {
  for (const char* field : {"d", "dimE", "dimF", "P0", "P"})
    if (!j.contains(field)) throw std::invalid_argument(std::string("operator JSON missing field '") + field + "'");
  int d = j.at("d").get<int>();
  int dimE = j.at("dimE").get<int>();
  int dimF = j.at("dimF").get<int>();
  if (d < 1) throw std::invalid_argument("field 'd' must be >= 1");
  RationalMatrix P0 = matrix_from_json(j.at("P0"), dimF, dimE, "P0");
  if (!j.at("P").is_array() || static_cast<int>(j.at("P").size()) != d)
    throw std::invalid_argument("field 'P' must list exactly d matrices");
  std::vector<RationalMatrix> P;
  for (int i = 0; i < d; ++i) P.push_back(matrix_from_json(j.at("P")[i], dimF, dimE, "P"));
  std::string label = j.value("label", std::string{});

  EStructure structure{};
  if (j.contains("structure")) {
    const auto& js = j.at("structure");
    std::string kind = js.at("kind").get<std::string>();
    if (kind == "tensor")
      structure = TensorStructure{js.at("rows").get<int>(), js.at("cols").get<int>()};
    else if (kind == "exterior")
      structure = ExteriorStructure{js.at("d").get<int>(), js.at("m").get<int>(),
                                    js.at("variance").get<std::string>() == "vector" ? Variance::vector
                                                                                     : Variance::covector};
    else
      throw std::invalid_argument("unknown structure kind '" + kind + "'");
  }
  std::optional<int> analytic;
  if (j.contains("analytic_ell")) analytic = j.at("analytic_ell").get<int>();
  return FirstOrderOperator(d, dimE, dimF, std::move(P0), std::move(P), std::move(label), structure, analytic);
}

}  // namespace wavecone
