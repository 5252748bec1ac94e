#include "wavecone/rational.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wavecone {

std::string to_string(const Rational& q) { return q.str(); }

Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  std::size_t slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(s));
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    return Rational(num, den);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed rational literal: '" + s + "'");
  }
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

Rational rationalize(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot rationalize non-finite value");
  if (max_den < 1) throw std::invalid_argument("max_den must be >= 1");
  bool neg = x < 0;
  double y = std::fabs(x);
  // Continued-fraction convergents p/q of y until the denominator bound.
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double frac = y;
  for (int iter = 0; iter < 64; ++iter) {
    double fa = std::floor(frac);
    if (fa > static_cast<double>(std::numeric_limits<std::int64_t>::max() / 4)) break;
    std::int64_t a = static_cast<std::int64_t>(fa);
    std::int64_t p2 = a * p1 + p0;
    std::int64_t q2 = a * q1 + q0;
    if (q2 > max_den || q2 <= 0) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double rem = frac - fa;
    if (rem < 1e-15 * std::max(1.0, y)) break;
    frac = 1.0 / rem;
  }
  if (q1 == 0) return Rational(0);
  Rational r(p1, q1);
  return neg ? Rational(-r) : r;
}

bool is_zero_vector(const RationalVector& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

std::vector<double> to_double_vector(const RationalVector& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(to_double(x));
  return out;
}

}  // namespace wavecone
