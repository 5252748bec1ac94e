#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "wavecone/operators.hpp"

#include <random>

using namespace wavecone;

namespace {

RationalVector vec(std::initializer_list<long long> xs) {
  RationalVector v;
  for (long long x : xs) v.push_back(x);
  return v;
}

RationalVector random_vec(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> entry(-4, 4);
  RationalVector v(n);
  for (;;) {
    bool nz = false;
    for (int i = 0; i < n; ++i) {
      v[i] = entry(rng);
      nz = nz || v[i] != 0;
    }
    if (nz) return v;
  }
}

}  // namespace

TEST_CASE("constructor rejects a vanishing principal part") {
  std::vector<RationalMatrix> P(2, RationalMatrix(1, 2));
  CHECK_THROWS_WITH_AS(FirstOrderOperator(2, 2, 1, RationalMatrix(1, 2), P), "principal part vanishes",
                       std::invalid_argument);
}

TEST_CASE("div principal symbol acts as M . xi") {
  auto div = make_div(2, 2);
  // e = [[1,0],[0,0]]; P(xi)[e] with xi = (1,0) selects the first column of e.
  RationalVector e = vec({1, 0, 0, 0});
  RationalMatrix sym = principal_symbol(div, vec({1, 0}));
  RationalVector out = sym.apply(e);
  CHECK(out == vec({1, 0}));
  // xi = 0 gives the zero matrix.
  CHECK(principal_symbol(div, vec({0, 0})).is_zero());
  CHECK_THROWS_AS(principal_symbol(div, vec({1, 0, 0})), std::invalid_argument);
}

TEST_CASE("curl(2,1) has the single equation d1 mu2 - d2 mu1") {
  auto curl = make_curl(2, 1);
  CHECK(curl.dimF() == 1);
  CHECK(curl.dimE() == 2);
  // symbol row [-xi2, xi1]
  RationalMatrix sym = principal_symbol(curl, vec({3, 5}));
  CHECK(sym.at(0, 0) == -5);
  CHECK(sym.at(0, 1) == 3);
}

TEST_CASE("symbol matrix examples") {
  auto div = make_div(2, 2);
  SymbolMatrix m = symbol_matrix(div, vec({1, 0, 0, 0}));
  CHECK(m.M.rows() == 2);
  CHECK(m.M.cols() == 2);
  CHECK(m.M.at(0, 0) == 1);
  CHECK(m.M.at(0, 1) == 0);
  CHECK(m.M.at(1, 0) == 0);
  CHECK(m.M.at(1, 1) == 0);
  CHECK(rank(m.M) == 1);

  auto curl = make_curl(2, 1);
  SymbolMatrix mc = symbol_matrix(curl, vec({1, 0}));
  CHECK(mc.M.rows() == 1);
  CHECK(mc.M.at(0, 0) == 0);
  CHECK(mc.M.at(0, 1) == -1);

  CHECK_THROWS_AS(symbol_matrix(div, vec({0, 0, 0, 0})), std::invalid_argument);
}

TEST_CASE("symbol matrix is linear in e and factors the principal symbol") {
  std::mt19937_64 rng(2);
  for (const auto& op : {make_curl(3, 2), make_div(2, 3), make_ext_derivative(4, 2), make_boundary(4, 2)}) {
    for (int trial = 0; trial < 20; ++trial) {
      RationalVector e1 = random_vec(op.dimE(), rng), e2 = random_vec(op.dimE(), rng);
      RationalVector sum(op.dimE());
      for (int i = 0; i < op.dimE(); ++i) sum[i] = e1[i] + e2[i];
      if (is_zero_vector(sum)) continue;
      auto m1 = symbol_matrix(op, e1).M, m2 = symbol_matrix(op, e2).M, ms = symbol_matrix(op, sum).M;
      for (int r = 0; r < ms.rows(); ++r)
        for (int c = 0; c < ms.cols(); ++c) CHECK(ms.at(r, c) == m1.at(r, c) + m2.at(r, c));
      // P(xi) e = M(e) xi on all coordinate directions.
      for (int i = 0; i < op.d(); ++i) {
        RationalVector xi(op.d());
        xi[i] = 1;
        CHECK(principal_symbol(op, xi).apply(e1) == m1.apply(xi));
      }
    }
  }
}

TEST_CASE("kernel directions examples") {
  // curl d=3, m=1; e = (0,0,1) has kernel span{(0,0,1)}.
  auto curl = make_curl(3, 1);
  CHECK(kernel_directions(curl, vec({0, 0, 1})) == Subspace::span_of(3, {vec({0, 0, 1})}));
  // Div k=2,d=2; e = [[1,0],[0,0]] -> span{(0,1)}.
  auto div = make_div(2, 2);
  CHECK(kernel_directions(div, vec({1, 0, 0, 0})) == Subspace::span_of(2, {vec({0, 1})}));
  // d on 1-forms of R^3 at e1* equals Ann^1(e1*) = span{e1}.
  auto ext = make_ext_derivative(3, 1);
  CHECK(kernel_directions(ext, vec({1, 0, 0})) == Subspace::span_of(3, {vec({1, 0, 0})}));
}

TEST_CASE("invariance space examples") {
  auto div = make_div(2, 2);
  CHECK(invariance_space(div, vec({1, 0, 0, 0})) == Subspace::span_of(2, {vec({1, 0})}));
  auto curl = make_curl(3, 1);
  Subspace inv = invariance_space(curl, vec({0, 0, 1}));
  CHECK(inv.dim() == 2);
  CHECK(inv == Subspace::span_of(3, {vec({1, 0, 0}), vec({0, 1, 0})}));
  // boundary on Lambda_2 R^4 at e12 + e34: annihilator is {0}, so full space.
  auto bnd = make_boundary(4, 2);
  RationalVector e(6);
  e[0] = 1;  // (1,2)
  e[5] = 1;  // (3,4)
  CHECK(invariance_space(bnd, e) == Subspace::full(4));
}

TEST_CASE("kernel and invariance dimensions are complementary") {
  std::mt19937_64 rng(9);
  for (const auto& op : {make_curl(3, 2), make_div(3, 3), make_ext_derivative(4, 1), make_boundary(4, 3)}) {
    for (int trial = 0; trial < 25; ++trial) {
      RationalVector e = random_vec(op.dimE(), rng);
      Subspace ker = kernel_directions(op, e);
      Subspace inv = invariance_space(op, e);
      CHECK(ker.dim() + inv.dim() == op.d());
      CHECK(ker.orthogonal_complement() == inv);
      // Scaling invariance of both spaces.
      RationalVector e3(e);
      for (auto& x : e3) x *= Rational(-7, 3);
      CHECK(kernel_directions(op, e3) == ker);
    }
  }
}

TEST_CASE("wave cone membership") {
  // curl d=3,m=2: rank-one e = a otimes xi is in the wave cone with direction xi.
  auto curl32 = make_curl(3, 2);
  RationalVector e(6);
  e[0] = e[1] = e[2] = 1;  // a = (1,0), xi = (1,1,1)
  WaveConeReport rep = wave_cone_member(curl32, e);
  CHECK(rep.member);
  REQUIRE(rep.kernel_direction.has_value());
  CHECK(*rep.kernel_direction == vec({1, 1, 1}));

  // curl d=2,m=2 at the identity matrix: not a member.
  auto curl22 = make_curl(2, 2);
  CHECK_FALSE(wave_cone_member(curl22, vec({1, 0, 0, 1})).member);

  // Div k=1,d=3: every nonzero e is a member (1x3 symbol matrix).
  auto div13 = make_div(1, 3);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) CHECK(wave_cone_member(div13, random_vec(3, rng)).member);
}

TEST_CASE("gallery symbols match the exterior algebra operations") {
  for (int d = 2; d <= 5; ++d) {
    for (int m = 0; m <= d - 1; ++m) {
      auto op = make_ext_derivative(d, m);
      for (std::uint64_t vmask : basis_masks(d, m))
        for (int i = 0; i < d; ++i) {
          RationalVector xi(d);
          xi[i] = 1;
          auto v = MultiVector::basis_element(d, vmask, Variance::covector);
          RationalVector image = principal_symbol(op, xi).apply(v.dense_coefficients());
          auto expect = wedge(MultiVector::from_coords(xi, Variance::covector), v);
          CHECK(image == expect.dense_coefficients());
        }
    }
    for (int m = 1; m <= d; ++m) {
      auto op = make_boundary(d, m);
      for (std::uint64_t vmask : basis_masks(d, m))
        for (int i = 0; i < d; ++i) {
          RationalVector xi(d);
          xi[i] = 1;
          auto v = MultiVector::basis_element(d, vmask, Variance::vector);
          RationalVector image = principal_symbol(op, xi).apply(v.dense_coefficients());
          auto expect = interior_mult(v, MultiVector::from_coords(xi, Variance::covector));
          CHECK(image == expect.dense_coefficients());
        }
    }
  }
}

TEST_CASE("kernel directions of d and d* are the annihilators") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> num(-4, 4);
  for (int d = 2; d <= 5; ++d) {
    for (int m = 1; m <= d - 1; ++m) {
      auto ext = make_ext_derivative(d, m);
      auto bnd = make_boundary(d, m);
      for (std::uint64_t vmask : basis_masks(d, m)) {
        auto vc = MultiVector::basis_element(d, vmask, Variance::covector);
        CHECK(kernel_directions(ext, vc.dense_coefficients()) == ann1_covector(vc));
        auto vv = MultiVector::basis_element(d, vmask, Variance::vector);
        CHECK(kernel_directions(bnd, vv.dense_coefficients()) == ann1_vector(vv));
      }
      for (int trial = 0; trial < 10; ++trial) {
        MultiVector vc(d, m, Variance::covector);
        for (std::uint64_t mask : basis_masks(d, m)) vc.set_coefficient(mask, num(rng));
        if (vc.is_zero()) continue;
        CHECK(kernel_directions(ext, vc.dense_coefficients()) == ann1_covector(vc));
        auto vv = musical_iso(vc);
        CHECK(kernel_directions(bnd, vv.dense_coefficients()) == ann1_vector(vv));
      }
    }
  }
}

TEST_CASE("inhomogeneous lift") {
  auto div = make_div(2, 3);
  auto lift = lift_inhomogeneous(div);
  CHECK(lift.dimE() == div.dimE() + div.dimF());
  CHECK(lift.dimF() == div.dimF());
  // The lifted symbol at (e, f) equals P(xi) e for every coordinate xi.
  std::mt19937_64 rng(8);
  RationalVector e = random_vec(div.dimE(), rng), f = random_vec(div.dimF(), rng);
  RationalVector ef(e);
  ef.insert(ef.end(), f.begin(), f.end());
  for (int i = 0; i < div.d(); ++i) {
    RationalVector xi(div.d());
    xi[i] = 1;
    CHECK(principal_symbol(lift, xi).apply(ef) == principal_symbol(div, xi).apply(e));
  }
  // P0 of the lift carries -Id on the F block.
  CHECK(lift.P0().at(0, div.dimE()) == -1);
  CHECK(lift.P0().at(1, div.dimE() + 1) == -1);
}

TEST_CASE("operator json round trip and diagnostics") {
  auto op = make_ext_derivative(4, 2);
  nlohmann::json j = op.to_json();
  auto back = FirstOrderOperator::from_json(j);
  CHECK(back.d() == op.d());
  CHECK(back.dimE() == op.dimE());
  CHECK(back.dimF() == op.dimF());
  CHECK(back.analytic_ell() == op.analytic_ell());
  for (int i = 0; i < op.d(); ++i) CHECK(back.P(i) == op.P(i));
  CHECK(std::holds_alternative<ExteriorStructure>(back.structure()));

  nlohmann::json missing = j;
  missing.erase("P0");
  CHECK_THROWS_WITH_AS(FirstOrderOperator::from_json(missing), "operator JSON missing field 'P0'",
                       std::invalid_argument);
  nlohmann::json ragged = j;
  ragged["P"][0][0].erase(0);
  CHECK_THROWS_AS(FirstOrderOperator::from_json(ragged), std::invalid_argument);
}

TEST_CASE("gallery range guards") {
  CHECK_THROWS_AS(make_curl(1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_ext_derivative(3, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_boundary(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_div(0, 2), std::invalid_argument);
}
