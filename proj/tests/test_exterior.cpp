#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "wavecone/multivector.hpp"

#include <random>

using namespace wavecone;

namespace {

MultiVector basis(int d, std::initializer_list<int> idx, Variance var) {
  std::uint64_t mask = 0;
  for (int i : idx) mask |= std::uint64_t(1) << (i - 1);
  return MultiVector::basis_element(d, mask, var);
}

std::uint64_t mask_of(std::initializer_list<int> idx) {
  std::uint64_t mask = 0;
  for (int i : idx) mask |= std::uint64_t(1) << (i - 1);
  return mask;
}

// Independent construction of the interior product from its defining identity
// <v . xi, z*> = <v, xi ^ z*>, coefficient by coefficient over basis z*.
MultiVector interior_via_identity(const MultiVector& v, const MultiVector& xi) {
  MultiVector res(v.ambient_dim(), v.grade() - 1, Variance::vector);
  for (std::uint64_t z : basis_masks(v.ambient_dim(), v.grade() - 1)) {
    MultiVector zstar = MultiVector::basis_element(v.ambient_dim(), z, Variance::covector);
    res.set_coefficient(z, pairing(v, wedge(xi, zstar)));
  }
  return res;
}

MultiVector random_mv(int d, int m, Variance var, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-4, 4);
  for (;;) {
    MultiVector v(d, m, var);
    for (std::uint64_t mask : basis_masks(d, m)) v.set_coefficient(mask, num(rng));
    if (!v.is_zero()) return v;
  }
}

}  // namespace

TEST_CASE("wedge on basis covectors") {
  auto e1 = basis(4, {1}, Variance::covector);
  auto e2 = basis(4, {2}, Variance::covector);
  CHECK(wedge(e1, e2) == basis(4, {1, 2}, Variance::covector));
  CHECK(wedge(e1, e1).is_zero());
  // (e1 + e2) ^ (e1 - e2) = -2 e1^e2
  auto lhs = wedge(e1 + e2, e1 - e2);
  CHECK(lhs == basis(4, {1, 2}, Variance::covector).scaled(-2));
}

TEST_CASE("wedge grade cap and errors") {
  auto a = basis(3, {1, 2}, Variance::covector);
  auto b = basis(3, {2, 3}, Variance::covector);
  auto z = wedge(a, b);  // formal grade 4 > d = 3
  CHECK(z.is_zero());
  CHECK(z.grade() == 3);
  CHECK_THROWS_AS(wedge(basis(3, {1}, Variance::covector), basis(4, {1}, Variance::covector)),
                  std::invalid_argument);
}

TEST_CASE("wedge graded anticommutativity exhaustively for d <= 5") {
  for (int d = 2; d <= 5; ++d)
    for (int p = 0; p <= d; ++p)
      for (int q = 0; p + q <= d; ++q)
        for (std::uint64_t ma : basis_masks(d, p))
          for (std::uint64_t mb : basis_masks(d, q)) {
            auto a = MultiVector::basis_element(d, ma, Variance::covector);
            auto b = MultiVector::basis_element(d, mb, Variance::covector);
            auto ab = wedge(a, b);
            auto ba = wedge(b, a);
            CHECK(ab == ((p * q) % 2 == 0 ? ba : ba.scaled(-1)));
          }
}

TEST_CASE("wedge associativity exhaustively for d <= 5") {
  for (int d = 2; d <= 5; ++d) {
    auto all = basis_masks(d, 1);
    for (std::uint64_t ma : all)
      for (std::uint64_t mb : basis_masks(d, 1))
        for (std::uint64_t mc : basis_masks(d, 2)) {
          auto a = MultiVector::basis_element(d, ma, Variance::covector);
          auto b = MultiVector::basis_element(d, mb, Variance::covector);
          auto c = MultiVector::basis_element(d, mc, Variance::covector);
          CHECK(wedge(wedge(a, b), c) == wedge(a, wedge(b, c)));
        }
  }
  // And on random sums.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    int d = 4;
    auto a = random_mv(d, 1, Variance::covector, rng);
    auto b = random_mv(d, 1, Variance::covector, rng);
    auto c = random_mv(d, 2, Variance::covector, rng);
    CHECK(wedge(wedge(a, b), c) == wedge(a, wedge(b, c)));
  }
}

TEST_CASE("pairing on dual bases") {
  CHECK(pairing(basis(4, {1, 2}, Variance::vector), basis(4, {1, 2}, Variance::covector)) == 1);
  CHECK(pairing(basis(4, {1, 2}, Variance::vector), basis(4, {1, 3}, Variance::covector)) == 0);
  auto v = basis(4, {1, 2}, Variance::vector).scaled(2) + basis(4, {3, 4}, Variance::vector);
  CHECK(pairing(v, basis(4, {3, 4}, Variance::covector)) == 1);
  CHECK_THROWS_AS(pairing(basis(4, {1}, Variance::vector), basis(4, {1, 2}, Variance::covector)),
                  std::invalid_argument);
}

TEST_CASE("musical isomorphism") {
  auto v = basis(4, {1, 2}, Variance::vector);
  auto w = musical_iso(v);
  CHECK(w.variance() == Variance::covector);
  CHECK(w == basis(4, {1, 2}, Variance::covector));
  CHECK(musical_iso(w) == v);
  auto lin = MultiVector::from_coords({Rational(2), Rational(3), Rational(0)}, Variance::vector);
  auto lin_star = musical_iso(lin);
  CHECK(lin_star.coefficient(mask_of({1})) == 2);
  CHECK(lin_star.coefficient(mask_of({2})) == 3);
}

TEST_CASE("interior multiplication matches its defining identity") {
  auto v12 = basis(4, {1, 2}, Variance::vector);
  CHECK(interior_mult(v12, basis(4, {1}, Variance::covector)) == basis(4, {2}, Variance::vector));
  CHECK(interior_mult(v12, basis(4, {3}, Variance::covector)).is_zero());

  // (e1^e2 + e3^e4) . (xi1 e1* + ... + xi4 e4*) = xi1 e2 - xi2 e1 + xi3 e4 - xi4 e3
  auto v = v12 + basis(4, {3, 4}, Variance::vector);
  RationalVector xi{Rational(1), Rational(2), Rational(3), Rational(4)};
  auto xistar = MultiVector::from_coords(xi, Variance::covector);
  auto got = interior_mult(v, xistar);
  MultiVector expect(4, 1, Variance::vector);
  expect.set_coefficient(mask_of({2}), 1);
  expect.set_coefficient(mask_of({1}), -2);
  expect.set_coefficient(mask_of({4}), 3);
  expect.set_coefficient(mask_of({3}), -4);
  CHECK(got == expect);
  CHECK(got == interior_via_identity(v, xistar));

  CHECK_THROWS_AS(interior_mult(MultiVector::basis_element(3, 0, Variance::vector),
                                basis(3, {1}, Variance::covector)),
                  std::invalid_argument);
}

TEST_CASE("defining identity exhaustively for d <= 5") {
  for (int d = 2; d <= 5; ++d)
    for (int m = 1; m <= d; ++m)
      for (std::uint64_t mv : basis_masks(d, m))
        for (std::uint64_t mx : basis_masks(d, 1)) {
          auto v = MultiVector::basis_element(d, mv, Variance::vector);
          auto xi = MultiVector::basis_element(d, mx, Variance::covector);
          CHECK(interior_mult(v, xi) == interior_via_identity(v, xi));
        }
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    int d = 2 + static_cast<int>(rng() % 4);
    int m = 1 + static_cast<int>(rng() % d);
    auto v = random_mv(d, m, Variance::vector, rng);
    auto xi = random_mv(d, 1, Variance::covector, rng);
    CHECK(interior_mult(v, xi) == interior_via_identity(v, xi));
  }
}

TEST_CASE("annihilator of covectors") {
  auto v = basis(4, {1, 2}, Variance::covector);
  Subspace ann = ann1_covector(v);
  CHECK(ann == Subspace::span_of(4, {{Rational(1), Rational(0), Rational(0), Rational(0)},
                                     {Rational(0), Rational(1), Rational(0), Rational(0)}}));
  auto w = v + basis(4, {3, 4}, Variance::covector);
  CHECK(ann1_covector(w).dim() == 0);
  CHECK(ann1_covector(basis(3, {1}, Variance::covector)) ==
        Subspace::span_of(3, {{Rational(1), Rational(0), Rational(0)}}));
  CHECK_THROWS_AS(ann1_covector(MultiVector::zero(3, 1, Variance::covector)), std::invalid_argument);
}

TEST_CASE("annihilator of vectors") {
  auto v = basis(4, {1, 2}, Variance::vector);
  Subspace ann = ann1_vector(v);
  CHECK(ann == Subspace::span_of(4, {{Rational(0), Rational(0), Rational(1), Rational(0)},
                                     {Rational(0), Rational(0), Rational(0), Rational(1)}}));
  CHECK(ann1_vector(v + basis(4, {3, 4}, Variance::vector)).dim() == 0);
  CHECK(ann1_vector(basis(3, {1}, Variance::vector)) ==
        Subspace::span_of(3, {{Rational(0), Rational(1), Rational(0)},
                              {Rational(0), Rational(0), Rational(1)}}));
}

TEST_CASE("annihilator membership agrees with direct wedge tests on a lattice") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    int d = 3 + static_cast<int>(rng() % 2);
    int m = 1 + static_cast<int>(rng() % (d - 1));
    auto v = random_mv(d, m, Variance::covector, rng);
    Subspace ann = ann1_covector(v);
    std::vector<int> xi(d, -2);
    for (;;) {
      RationalVector rxi(d);
      bool zero = true;
      for (int k = 0; k < d; ++k) {
        rxi[k] = xi[k];
        zero = zero && xi[k] == 0;
      }
      if (!zero) {
        bool kills = wedge(MultiVector::from_coords(rxi, Variance::covector), v).is_zero();
        CHECK(kills == ann.contains(rxi));
      }
      int k = d - 1;
      while (k >= 0 && ++xi[k] > 2) {
        xi[k] = -2;
        --k;
      }
      if (k < 0) break;
    }
  }
}

TEST_CASE("simplicity detection and factorization") {
  auto s = is_simple(basis(4, {1, 2}, Variance::covector));
  CHECK(s.simple);
  REQUIRE(s.factors.size() == 2);
  CHECK(wedge(s.factors[0], s.factors[1]) == basis(4, {1, 2}, Variance::covector));

  auto sum = basis(4, {1, 2}, Variance::covector) + basis(4, {3, 4}, Variance::covector);
  CHECK_FALSE(is_simple(sum).simple);

  // e1*^e2* + e1*^e3* = e1* ^ (e2* + e3*)
  auto mixed = basis(4, {1, 2}, Variance::covector) + basis(4, {1, 3}, Variance::covector);
  auto sm = is_simple(mixed);
  CHECK(sm.simple);
  MultiVector rebuilt = sm.factors[0];
  for (std::size_t i = 1; i < sm.factors.size(); ++i) rebuilt = wedge(rebuilt, sm.factors[i]);
  CHECK(rebuilt == mixed);

  // Vector variance, including the top grade.
  CHECK(is_simple(basis(4, {1, 2, 3, 4}, Variance::vector)).simple);
  CHECK(is_simple(basis(3, {2}, Variance::vector)).simple);
  CHECK_FALSE(is_simple(basis(4, {1, 2}, Variance::vector) + basis(4, {3, 4}, Variance::vector)).simple);
}

TEST_CASE("annihilator dimension is invariant under signed permutations") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    int d = 4;
    int m = 2;
    auto v = random_mv(d, m, Variance::covector, rng);
    std::vector<int> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> sign(d);
    for (int& s : sign) s = (rng() % 2) ? 1 : -1;
    // Lift the signed permutation through wedge products of mapped 1-covectors.
    MultiVector image(d, m, Variance::covector);
    for (const auto& [mask, c] : v.terms()) {
      MultiVector term(d, 0, Variance::covector);
      term.set_coefficient(0, c);
      for (int i = 0; i < d; ++i)
        if (mask & (std::uint64_t(1) << i)) {
          RationalVector coords(d);
          coords[perm[i]] = sign[i];
          term = wedge(term, MultiVector::from_coords(coords, Variance::covector));
        }
      image = image + term;
    }
    CHECK(ann1_covector(image).dim() == ann1_covector(v).dim());
  }
}

TEST_CASE("lemma oracle on the spec instances") {
  CHECK(lemma_ab_oracle(4, 2, 100, 0).pass);
  CHECK(lemma_ab_oracle(3, 3, 10, 0).pass);
  CHECK(lemma_ab_oracle(5, 2, 200, 0).pass);
  CHECK_THROWS_AS(lemma_ab_oracle(7, 1, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(lemma_ab_oracle(3, 0, 10, 0), std::invalid_argument);
}

TEST_CASE("multivector json round trip with canonical rationals") {
  auto v = basis(4, {1, 3}, Variance::covector).scaled(Rational(-6, 8)) + basis(4, {2, 4}, Variance::covector);
  nlohmann::json j = v.to_json();
  CHECK(j["dim"] == 4);
  CHECK(j["grade"] == 2);
  CHECK(j["variance"] == "covector");
  CHECK(j["terms"][0]["coef"] == "-3/4");
  CHECK(MultiVector::from_json(j) == v);
  // Malformed tuples are rejected.
  nlohmann::json bad = j;
  bad["terms"][0]["idx"] = {3, 1};
  CHECK_THROWS_AS(MultiVector::from_json(bad), std::invalid_argument);
}
