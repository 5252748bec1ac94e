#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "wavecone/rational_matrix.hpp"
#include "wavecone/subspace.hpp"

#include <random>

using namespace wavecone;

namespace {

RationalVector vec(std::initializer_list<long long> xs) {
  RationalVector v;
  for (long long x : xs) v.push_back(x);
  return v;
}

}  // namespace

TEST_CASE("rational parsing and canonical strings") {
  CHECK(to_string(parse_rational("3/4")) == "3/4");
  CHECK(to_string(parse_rational("-6/8")) == "-3/4");
  CHECK(to_string(parse_rational("5")) == "5");
  CHECK(to_string(parse_rational("10/-4")) == "-5/2");
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
}

TEST_CASE("continued-fraction rationalization") {
  CHECK(rationalize(0.5, 100) == Rational(1, 2));
  CHECK(rationalize(-0.25, 100) == Rational(-1, 4));
  CHECK(rationalize(0.0, 100) == 0);
  CHECK(rationalize(2.0, 100) == 2);
  // 1/sqrt(2) with denominator bound 1000 -> convergent 408/577.
  CHECK(rationalize(0.7071067811865476, 1000) == Rational(408, 577));
  // Exact recovery of small fractions from their double image.
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> num(-50, 50), den(1, 97);
  for (int i = 0; i < 500; ++i) {
    int p = num(rng), q = den(rng);
    Rational expect(p, q);
    CHECK(rationalize(to_double(expect), 10'000) == expect);
  }
}

TEST_CASE("rref rank and nullspace") {
  RationalMatrix m(3, 4);
  // rows: (1,2,3,4), (2,4,6,8), (0,1,1,0) -> rank 2
  long long rows[3][4] = {{1, 2, 3, 4}, {2, 4, 6, 8}, {0, 1, 1, 0}};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) m.at(r, c) = rows[r][c];
  CHECK(rank(m) == 2);
  auto ns = nullspace_rows(m);
  CHECK(ns.size() == 2);
  for (const auto& v : ns) {
    RationalVector img = m.apply(v);
    CHECK(is_zero_vector(img));
  }
}

TEST_CASE("nullspace dimension counts") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> entry(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    int r = 1 + static_cast<int>(rng() % 4), c = 1 + static_cast<int>(rng() % 4);
    RationalMatrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m.at(i, j) = entry(rng);
    CHECK(rank(m) + static_cast<int>(nullspace_rows(m).size()) == c);
  }
}

TEST_CASE("int64 Bareiss rank agrees with the rational path") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> entry(-4, 4);
  for (int trial = 0; trial < 300; ++trial) {
    int r = 1 + static_cast<int>(rng() % 6), c = 1 + static_cast<int>(rng() % 6);
    std::vector<std::int64_t> a(static_cast<std::size_t>(r) * c);
    RationalMatrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) {
        int v = entry(rng);
        a[static_cast<std::size_t>(i) * c + j] = v;
        m.at(i, j) = v;
      }
    auto fast = int64_rank(a, r, c);
    REQUIRE(fast.has_value());
    CHECK(*fast == rank(m));
  }
}

TEST_CASE("subspace canonical form and membership") {
  // Same plane from two different spanning sets.
  Subspace s1 = Subspace::span_of(3, {vec({1, 1, 0}), vec({0, 0, 1})});
  Subspace s2 = Subspace::span_of(3, {vec({2, 2, 2}), vec({0, 0, 5}), vec({1, 1, 3})});
  CHECK(s1 == s2);
  CHECK(s1.dim() == 2);
  CHECK(s1.contains(vec({3, 3, -7})));
  CHECK_FALSE(s1.contains(vec({1, 0, 0})));
}

TEST_CASE("orthogonal complement") {
  Subspace line = Subspace::span_of(3, {vec({1, 2, 2})});
  Subspace perp = line.orthogonal_complement();
  CHECK(perp.dim() == 2);
  for (int i = 0; i < perp.dim(); ++i) {
    RationalVector w = perp.basis_row(i);
    Rational dot = w[0] * 1 + w[1] * 2 + w[2] * 2;
    CHECK(dot == 0);
  }
  CHECK(perp.orthogonal_complement() == line);
  CHECK(Subspace::zero(4).orthogonal_complement() == Subspace::full(4));
  CHECK(Subspace::full(4).orthogonal_complement() == Subspace::zero(4));
}

TEST_CASE("subspace sum and json round trip") {
  Subspace a = Subspace::span_of(4, {vec({1, 0, 0, 1})});
  Subspace b = Subspace::span_of(4, {vec({0, 1, 0, 0})});
  Subspace s = a.sum(b);
  CHECK(s.dim() == 2);
  CHECK(s.contains(vec({1, 1, 0, 1})));
  CHECK(Subspace::from_json(s.to_json()) == s);
}
