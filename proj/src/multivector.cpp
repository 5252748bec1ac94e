#include "wavecone/multivector.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <sstream>
#include <stdexcept>

namespace wavecone {

namespace {

std::vector<int> mask_to_tuple(std::uint64_t mask) {
  std::vector<int> idx;
  for (int i = 0; mask; ++i, mask >>= 1)
    if (mask & 1) idx.push_back(i + 1);
  return idx;
}

std::uint64_t tuple_to_mask(const std::vector<int>& idx, int d) {
  std::uint64_t mask = 0;
  int prev = 0;
  for (int i : idx) {
    if (i <= prev || i > d) throw std::invalid_argument("index tuple must be strictly increasing within 1..d");
    mask |= std::uint64_t(1) << (i - 1);
    prev = i;
  }
  return mask;
}

void check_same_space(const MultiVector& a, const MultiVector& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw std::invalid_argument("ambient dimension mismatch");
}

}  // namespace

MultiVector::MultiVector(int ambient_dim, int grade, Variance variance)
    : d_(ambient_dim), grade_(grade), var_(variance) {
  if (d_ < 1 || d_ > 62) throw std::invalid_argument("ambient dimension out of range");
  if (grade_ < 0 || grade_ > d_) throw std::invalid_argument("grade out of range");
}

MultiVector MultiVector::basis_element(int d, std::uint64_t mask, Variance variance) {
  MultiVector v(d, std::popcount(mask), variance);
  v.terms_[mask] = 1;
  return v;
}

MultiVector MultiVector::from_coords(const RationalVector& coords, Variance variance) {
  MultiVector v(static_cast<int>(coords.size()), 1, variance);
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (coords[i] != 0) v.terms_[std::uint64_t(1) << i] = coords[i];
  return v;
}

Rational MultiVector::coefficient(std::uint64_t mask) const {
  auto it = terms_.find(mask);
  return it == terms_.end() ? Rational(0) : it->second;
}

void MultiVector::set_coefficient(std::uint64_t mask, const Rational& c) {
  if (std::popcount(mask) != grade_) throw std::invalid_argument("mask grade mismatch");
  if (mask >= (std::uint64_t(1) << d_)) throw std::invalid_argument("mask exceeds ambient dimension");
  if (c == 0)
    terms_.erase(mask);
  else
    terms_[mask] = c;
}

RationalVector MultiVector::dense_coefficients() const {
  auto masks = basis_masks(d_, grade_);
  RationalVector out(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i) out[i] = coefficient(masks[i]);
  return out;
}

MultiVector MultiVector::from_dense(int d, int grade, Variance variance, const RationalVector& coeffs) {
  auto masks = basis_masks(d, grade);
  if (coeffs.size() != masks.size()) throw std::invalid_argument("dense coefficient length mismatch");
  MultiVector v(d, grade, variance);
  for (std::size_t i = 0; i < masks.size(); ++i) v.set_coefficient(masks[i], coeffs[i]);
  return v;
}

MultiVector MultiVector::operator+(const MultiVector& o) const {
  check_same_space(*this, o);
  if (grade_ != o.grade_ || var_ != o.var_) throw std::invalid_argument("grade/variance mismatch in sum");
  MultiVector out = *this;
  for (const auto& [mask, c] : o.terms_) out.set_coefficient(mask, out.coefficient(mask) + c);
  return out;
}

MultiVector MultiVector::operator-(const MultiVector& o) const { return *this + o.scaled(-1); }

MultiVector MultiVector::scaled(const Rational& c) const {
  MultiVector out(d_, grade_, var_);
  if (c == 0) return out;
  for (const auto& [mask, coef] : terms_) out.terms_[mask] = coef * c;
  return out;
}

bool MultiVector::operator==(const MultiVector& o) const {
  return d_ == o.d_ && grade_ == o.grade_ && var_ == o.var_ && terms_ == o.terms_;
}

std::string MultiVector::to_pretty_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::uint64_t mask : basis_masks(d_, grade_)) {
    auto it = terms_.find(mask);
    if (it == terms_.end()) continue;
    if (!first) os << " + ";
    first = false;
    os << to_string(it->second) << "*e[";
    auto idx = mask_to_tuple(mask);
    for (std::size_t k = 0; k < idx.size(); ++k) os << (k ? "," : "") << idx[k];
    os << "]";
  }
  if (var_ == Variance::covector) os << "*";
  return os.str();
}

nlohmann::json MultiVector::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (std::uint64_t mask : basis_masks(d_, grade_)) {
    auto it = terms_.find(mask);
    if (it == terms_.end()) continue;
    terms.push_back({{"idx", mask_to_tuple(mask)}, {"coef", to_string(it->second)}});
  }
  return {{"dim", d_},
          {"grade", grade_},
          {"variance", var_ == Variance::vector ? "vector" : "covector"},
          {"terms", terms}};
}

MultiVector MultiVector::from_json(const nlohmann::json& j) {
  int d = j.at("dim").get<int>();
  int grade = j.at("grade").get<int>();
  std::string var = j.at("variance").get<std::string>();
  if (var != "vector" && var != "covector") throw std::invalid_argument("variance must be 'vector' or 'covector'");
  MultiVector v(d, grade, var == "vector" ? Variance::vector : Variance::covector);
  for (const auto& t : j.at("terms")) {
    auto idx = t.at("idx").get<std::vector<int>>();
    if (static_cast<int>(idx.size()) != grade) throw std::invalid_argument("term index tuple has wrong length");
    std::uint64_t mask = tuple_to_mask(idx, d);
    const auto& jc = t.at("coef");
    Rational c = jc.is_string() ? parse_rational(jc.get<std::string>()) : Rational(jc.get<long long>());
    v.set_coefficient(mask, v.coefficient(mask) + c);
  }
  return v;
}

std::vector<std::uint64_t> basis_masks(int d, int m) {
  std::vector<std::uint64_t> out;
  if (m < 0 || m > d) return out;
  if (m == 0) {
    out.push_back(0);
    return out;
  }
  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i + 1;
  for (;;) {
    std::uint64_t mask = 0;
    for (int i : idx) mask |= std::uint64_t(1) << (i - 1);
    out.push_back(mask);
    int k = m - 1;
    while (k >= 0 && idx[k] == d - (m - 1 - k)) --k;
    if (k < 0) break;
    ++idx[k];
    for (int j = k + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

int shuffle_sign(std::uint64_t a, std::uint64_t b) {
  // Count pairs (i in a, j in b) with j < i.
  int inversions = 0;
  for (std::uint64_t rest = a; rest;) {
    std::uint64_t bit = rest & (~rest + 1);
    std::uint64_t below = bit - 1;
    inversions += std::popcount(b & below);
    rest ^= bit;
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

MultiVector wedge(const MultiVector& a, const MultiVector& b) {
  check_same_space(a, b);
  if (a.variance() != b.variance()) throw std::invalid_argument("wedge requires matching variance");
  int d = a.ambient_dim();
  int g = a.grade() + b.grade();
  MultiVector out(d, std::min(g, d), a.variance());
  if (g > d) return out;  // canonical zero, grade capped
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      if (ma & mb) continue;
      Rational c = ca * cb * shuffle_sign(ma, mb);
      out.set_coefficient(ma | mb, out.coefficient(ma | mb) + c);
    }
  }
  return out;
}

Rational pairing(const MultiVector& v, const MultiVector& w) {
  check_same_space(v, w);
  if (v.grade() != w.grade()) throw std::invalid_argument("pairing requires equal grades");
  if (v.variance() != Variance::vector || w.variance() != Variance::covector)
    throw std::invalid_argument("pairing takes (vector, covector)");
  Rational acc = 0;
  for (const auto& [mask, c] : v.terms()) acc += c * w.coefficient(mask);
  return acc;
}

MultiVector musical_iso(const MultiVector& x) {
  MultiVector out(x.ambient_dim(), x.grade(),
                  x.variance() == Variance::vector ? Variance::covector : Variance::vector);
  for (const auto& [mask, c] : x.terms()) out.set_coefficient(mask, c);
  return out;
}

MultiVector interior_mult(const MultiVector& v, const MultiVector& xi) {
  check_same_space(v, xi);
  if (v.variance() != Variance::vector) throw std::invalid_argument("interior_mult takes an m-vector");
  if (xi.variance() != Variance::covector || xi.grade() != 1)
    throw std::invalid_argument("interior_mult takes a 1-covector");
  if (v.grade() < 1) throw std::invalid_argument("interior_mult needs grade >= 1");
  MultiVector out(v.ambient_dim(), v.grade() - 1, Variance::vector);
  for (const auto& [mask, c] : v.terms()) {
    for (std::uint64_t rest = mask; rest;) {
      std::uint64_t bit = rest & (~rest + 1);
      rest ^= bit;
      Rational xc = xi.coefficient(bit);
      if (xc == 0) continue;
      // <v, e_i* ^ z*> with z* = mask \ {i}: sign counts indices of mask below i.
      int sign = (std::popcount(mask & (bit - 1)) % 2 == 0) ? 1 : -1;
      std::uint64_t zmask = mask ^ bit;
      out.set_coefficient(zmask, out.coefficient(zmask) + c * xc * sign);
    }
  }
  return out;
}

namespace {

// Matrix of the linear map xi -> L(xi) expressed on basis targets, columns
// indexed by xi-coordinates; null space gives the annihilator subspace.
Subspace annihilator_of_map(int d, const std::vector<std::uint64_t>& target_masks,
                            const std::vector<MultiVector>& images) {
  RationalMatrix m(static_cast<int>(target_masks.size()), d);
  for (int col = 0; col < d; ++col)
    for (std::size_t rowi = 0; rowi < target_masks.size(); ++rowi)
      m.at(static_cast<int>(rowi), col) = images[col].coefficient(target_masks[rowi]);
  return Subspace::span_of(d, nullspace_rows(m));
}

}  // namespace

Subspace ann1_covector(const MultiVector& v) {
  if (v.is_zero()) throw std::invalid_argument("ann1_covector of the zero element");
  if (v.variance() != Variance::covector) throw std::invalid_argument("ann1_covector takes a covector");
  int d = v.ambient_dim();
  if (v.grade() == d) return Subspace::full(d);  // Lambda^{d+1} = 0
  std::vector<MultiVector> images;
  for (int i = 0; i < d; ++i)
    images.push_back(wedge(MultiVector::basis_element(d, std::uint64_t(1) << i, Variance::covector), v));
  return annihilator_of_map(d, basis_masks(d, v.grade() + 1), images);
}

Subspace ann1_vector(const MultiVector& v) {
  if (v.is_zero()) throw std::invalid_argument("ann1_vector of the zero element");
  if (v.variance() != Variance::vector) throw std::invalid_argument("ann1_vector takes a vector");
  if (v.grade() < 1) throw std::invalid_argument("ann1_vector needs grade >= 1");
  int d = v.ambient_dim();
  std::vector<MultiVector> images;
  for (int i = 0; i < d; ++i)
    images.push_back(interior_mult(v, MultiVector::basis_element(d, std::uint64_t(1) << i, Variance::covector)));
  return annihilator_of_map(d, basis_masks(d, v.grade() - 1), images);
}

SimplicityResult is_simple(const MultiVector& v) {
  if (v.is_zero()) throw std::invalid_argument("is_simple of the zero element");
  SimplicityResult res;
  int m = v.grade();
  if (m == 0) {
    res.simple = true;  // nonzero scalar
    return res;
  }
  int d = v.ambient_dim();

  Subspace span(d);
  if (v.variance() == Variance::covector) {
    Subspace ann = ann1_covector(v);
    if (ann.dim() != m) return res;
    span = ann;  // v = c * xi_1* ^ ... ^ xi_m* over a basis of Ann^1
  } else {
    Subspace ann = ann1_vector(v);
    if (ann.dim() != d - m) return res;
    span = ann.orthogonal_complement();  // v spans this W in Gr(m, d)
  }

  std::vector<MultiVector> factors;
  for (int i = 0; i < span.dim(); ++i) factors.push_back(MultiVector::from_coords(span.basis_row(i), v.variance()));
  MultiVector w = factors[0];
  for (std::size_t i = 1; i < factors.size(); ++i) w = wedge(w, factors[i]);
  if (w.is_zero()) return res;

  std::uint64_t probe = w.terms().begin()->first;
  Rational scale = v.coefficient(probe) / w.coefficient(probe);
  if (scale == 0 || !(w.scaled(scale) == v)) return res;  // factorization must reproduce v exactly

  factors[0] = factors[0].scaled(scale);
  res.simple = true;
  res.factors = std::move(factors);
  return res;
}

namespace {

MultiVector random_multivector(int d, int m, Variance var, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-4, 4);
  std::uniform_int_distribution<int> den(1, 3);
  for (;;) {
    MultiVector v(d, m, var);
    for (std::uint64_t mask : basis_masks(d, m)) v.set_coefficient(mask, Rational(num(rng), den(rng)));
    if (!v.is_zero()) return v;
  }
}

MultiVector random_simple(int d, int m, Variance var, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-3, 3);
  for (;;) {
    MultiVector w(d, 0, var);
    w.set_coefficient(0, 1);
    for (int k = 0; k < m; ++k) {
      RationalVector coords(d);
      for (int i = 0; i < d; ++i) coords[i] = num(rng);
      w = wedge(w, MultiVector::from_coords(coords, var));
    }
    if (!w.is_zero()) return w;
  }
}

bool check_one(const MultiVector& v, int m, int d, std::string* why) {
  bool covector = v.variance() == Variance::covector;
  int ann_dim = covector ? ann1_covector(v).dim() : ann1_vector(v).dim();
  int bound = covector ? m : d - m;
  if (ann_dim > bound) {
    *why = "annihilator dimension above bound on " + v.to_pretty_string();
    return false;
  }
  SimplicityResult s = is_simple(v);
  if (s.simple != (ann_dim == bound)) {
    *why = "simplicity/extremal-dimension mismatch on " + v.to_pretty_string();
    return false;
  }
  if (s.simple && m >= 1) {
    MultiVector w = s.factors[0];
    for (std::size_t i = 1; i < s.factors.size(); ++i) w = wedge(w, s.factors[i]);
    if (!(w == v)) {
      *why = "factorization does not reproduce " + v.to_pretty_string();
      return false;
    }
  }
  return true;
}

}  // namespace

LemmaReport lemma_ab_oracle(int d, int m, int samples, std::uint64_t seed) {
  if (d < 1 || d > 6 || m < 1 || m > d) throw std::invalid_argument("lemma_ab_oracle requires 1 <= m <= d <= 6");
  LemmaReport rep;
  std::string why;

  for (std::uint64_t mask : basis_masks(d, m)) {
    for (Variance var : {Variance::covector, Variance::vector}) {
      MultiVector v = MultiVector::basis_element(d, mask, var);
      int ann_dim = var == Variance::covector ? ann1_covector(v).dim() : ann1_vector(v).dim();
      int expect = var == Variance::covector ? m : d - m;
      if (ann_dim != expect || !check_one(v, m, d, &why)) {
        rep.pass = false;
        rep.counterexample = why.empty() ? v.to_pretty_string() : why;
        return rep;
      }
      ++rep.basis_cases;
    }
  }

  std::mt19937_64 rng(seed);
  for (int k = 0; k < samples; ++k) {
    Variance var = (k % 2 == 0) ? Variance::covector : Variance::vector;
    MultiVector v = (k % 4 < 2) ? random_multivector(d, m, var, rng) : random_simple(d, m, var, rng);
    if (!check_one(v, m, d, &why)) {
      rep.pass = false;
      rep.counterexample = why;
      return rep;
    }
    // Constructed-simple samples must be detected simple.
    if (k % 4 >= 2 && !is_simple(v).simple) {
      rep.pass = false;
      rep.counterexample = "constructed simple element not detected: " + v.to_pretty_string();
      return rep;
    }
    ++rep.random_cases;
  }
  return rep;
}

}  // namespace wavecone
