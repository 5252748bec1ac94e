#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace wavecone {

// Exact arbitrary-precision rational scalar. boost keeps values gcd-reduced
// with a positive denominator, which is exactly the canonical form the JSON
// interfaces require.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

using RationalVector = std::vector<Rational>;

/// Canonical string form: "p/q" with q > 1, plain "p" for integers.
std::string to_string(const Rational& q);

/// Parses "p", "-p", or "p/q". Throws std::invalid_argument on malformed input.
Rational parse_rational(const std::string& s);

double to_double(const Rational& q);

/// Best continued-fraction convergent of x with denominator <= max_den.
Rational rationalize(double x, std::int64_t max_den);

bool is_zero_vector(const RationalVector& v);

std::vector<double> to_double_vector(const RationalVector& v);

}  // namespace wavecone
