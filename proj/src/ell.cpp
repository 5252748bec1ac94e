#include "wavecone/ell.hpp"

#include "wavecone/parallel.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <climits>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>

namespace wavecone {

std::string to_string(CertMode mode) {
  switch (mode) {
    case CertMode::certified_upper_bound: return "certified-upper-bound";
    case CertMode::lattice_exhausted: return "lattice-exhausted";
    case CertMode::analytic: return "analytic";
  }
  return "certified-upper-bound";
}

CertMode cert_mode_from_string(const std::string& s) {
  if (s == "certified-upper-bound") return CertMode::certified_upper_bound;
  if (s == "lattice-exhausted") return CertMode::lattice_exhausted;
  if (s == "analytic") return CertMode::analytic;
  throw std::invalid_argument("unknown certificate mode '" + s + "'");
}

nlohmann::json EllCertificate::to_json() const {
  nlohmann::json jw = nlohmann::json::array();
  for (const auto& x : witness) jw.push_back(wavecone::to_string(x));
  return {{"value", value},
          {"witness", jw},
          {"invariance_space", invariance.to_json()},
          {"mode", wavecone::to_string(mode)},
          {"search_log",
           {{"seed", log.seed},
            {"lattice_height", log.lattice_height},
            {"lattice_exhausted", log.lattice_exhausted},
            {"structured_candidates", log.structured_candidates},
            {"lattice_candidates", log.lattice_candidates},
            {"descent_restarts", log.descent_restarts},
            {"descent_accepted", log.descent_accepted}}}};
}

EllCertificate EllCertificate::from_json(const nlohmann::json& j) {
  EllCertificate c;
  c.value = j.at("value").get<int>();
  for (const auto& je : j.at("witness"))
    c.witness.push_back(je.is_string() ? parse_rational(je.get<std::string>()) : Rational(je.get<long long>()));
  c.invariance = Subspace::from_json(j.at("invariance_space"));
  c.mode = cert_mode_from_string(j.at("mode").get<std::string>());
  const auto& jl = j.at("search_log");
  c.log.seed = jl.at("seed").get<std::uint64_t>();
  c.log.lattice_height = jl.at("lattice_height").get<int>();
  c.log.lattice_exhausted = jl.at("lattice_exhausted").get<bool>();
  c.log.structured_candidates = jl.at("structured_candidates").get<std::uint64_t>();
  c.log.lattice_candidates = jl.at("lattice_candidates").get<std::uint64_t>();
  c.log.descent_restarts = jl.at("descent_restarts").get<int>();
  c.log.descent_accepted = jl.at("descent_accepted").get<int>();
  return c;
}

namespace {

// ---- integer symbol-matrix machinery ---------------------------------------

struct IntSymbolContext {
  int d, dimE, dimF;
  // coeff[j][r * d + i]: contribution of e_j to M(e)[r][i], i.e. P_i[r][j].
  std::vector<std::vector<std::int64_t>> coeff;

  explicit IntSymbolContext(const FirstOrderOperator& op)
      : d(op.d()), dimE(op.dimE()), dimF(op.dimF()), coeff(op.dimE()) {
    const auto& pint = op.integer_principal();
    for (int j = 0; j < dimE; ++j) {
      coeff[j].assign(static_cast<std::size_t>(dimF) * d, 0);
      for (int i = 0; i < d; ++i)
        for (int r = 0; r < dimF; ++r)
          coeff[j][static_cast<std::size_t>(r) * d + i] = pint[i][static_cast<std::size_t>(r) * dimE + j];
    }
  }

  void accumulate(std::vector<std::int64_t>& M, int j, std::int64_t scale) const {
    const auto& c = coeff[j];
    for (std::size_t t = 0; t < c.size(); ++t) M[t] += scale * c[t];
  }
};

int rank_from_int_matrix(const std::vector<std::int64_t>& M, int rows, int cols,
                         const FirstOrderOperator& op, const std::vector<std::int64_t>& e) {
  if (auto r = int64_rank(M, rows, cols)) return *r;
  // Overflow fallback: exact rational rank of the same symbol matrix.
  RationalVector re(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) re[i] = e[i];
  return rank(symbol_matrix(op, re).M);
}

int exact_rank(const FirstOrderOperator& op, const std::vector<std::int64_t>& e) {
  IntSymbolContext ctx(op);
  std::vector<std::int64_t> M(static_cast<std::size_t>(ctx.dimF) * ctx.d, 0);
  for (int j = 0; j < ctx.dimE; ++j)
    if (e[j] != 0) ctx.accumulate(M, j, e[j]);
  return rank_from_int_matrix(M, ctx.dimF, ctx.d, op, e);
}

struct ScanResult {
  bool found = false;
  int best = INT_MAX;
  std::vector<std::int64_t> witness;
  std::uint64_t examined = 0;
};

void merge_scans(ScanResult& into, const ScanResult& part) {
  into.examined += part.examined;
  if (part.found && (!into.found || part.best < into.best)) {
    into.found = true;
    into.best = part.best;
    into.witness = part.witness;
  }
}

// Depth-first enumeration of {-H..H}^dimE in lexicographic order (entries
// compared numerically), with the symbol matrix accumulated incrementally.
// canonical=true keeps one representative per projective class: first nonzero
// entry positive and entry gcd 1.
class LatticeScanner {
 public:
  LatticeScanner(const FirstOrderOperator& op, const IntSymbolContext& ctx, int height, bool canonical)
      : op_(op), ctx_(ctx), h_(height), canonical_(canonical) {}

  // Scans the subtree with digit 0 fixed to top_value.
  ScanResult scan_top(int top_value) {
    ScanResult res;
    if (canonical_ && top_value < 0) return res;
    digits_.assign(ctx_.dimE, 0);
    M_.assign(static_cast<std::size_t>(ctx_.dimF) * ctx_.d, 0);
    digits_[0] = top_value;
    if (top_value != 0) ctx_.accumulate(M_, 0, top_value);
    descend(1, top_value != 0, std::llabs(top_value), res);
    return res;
  }

 private:
  void descend(int level, bool any_nonzero, std::int64_t g, ScanResult& res) {
    if (level == ctx_.dimE) {
      if (!any_nonzero) return;
      if (canonical_ && g != 1) return;
      ++res.examined;
      int r = rank_from_int_matrix(M_, ctx_.dimF, ctx_.d, op_, digits_);
      if (!res.found || r < res.best) {
        res.found = true;
        res.best = r;
        res.witness = digits_;
      }
      return;
    }
    int lo = -h_;
    if (canonical_ && !any_nonzero) lo = 0;  // negative first-nonzero pruned
    ctx_.accumulate(M_, level, lo);
    for (int v = lo;; ++v) {
      digits_[level] = v;
      descend(level + 1, any_nonzero || v != 0, std::gcd(g, static_cast<std::int64_t>(std::llabs(v))), res);
      if (v == h_) break;
      ctx_.accumulate(M_, level, 1);
    }
    ctx_.accumulate(M_, level, -static_cast<std::int64_t>(h_));
    digits_[level] = 0;
  }

  const FirstOrderOperator& op_;
  const IntSymbolContext& ctx_;
  int h_;
  bool canonical_;
  std::vector<std::int64_t> digits_;
  std::vector<std::int64_t> M_;
};

ScanResult scan_lattice(const FirstOrderOperator& op, int height, bool canonical) {
  IntSymbolContext ctx(op);
  int b = 2 * height + 1;
  std::vector<ScanResult> parts(b);
  parallel_tasks(b, [&](std::size_t t) {
    LatticeScanner scanner(op, ctx, height, canonical);
    parts[t] = scanner.scan_top(static_cast<int>(t) - height);
  });
  ScanResult total;
  for (const auto& p : parts) merge_scans(total, p);  // task order keeps lex-first witness
  return total;
}

bool lattice_fits(const FirstOrderOperator& op, int height, std::uint64_t limit = 10'000'000) {
  long double size = 1;
  for (int i = 0; i < op.dimE(); ++i) {
    size *= 2 * height + 1;
    if (size > static_cast<long double>(limit)) return false;
  }
  return true;
}

// ---- structured candidates --------------------------------------------------

std::vector<std::int64_t> random_int_vector(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> entry(-3, 3);
  std::vector<std::int64_t> v(n);
  for (;;) {
    bool nonzero = false;
    for (int i = 0; i < n; ++i) {
      v[i] = entry(rng);
      nonzero = nonzero || v[i] != 0;
    }
    if (nonzero) return v;
  }
}

std::vector<std::vector<std::int64_t>> structured_candidates(const FirstOrderOperator& op, int random_samples,
                                                             std::mt19937_64& rng) {
  std::vector<std::vector<std::int64_t>> out;
  int dimE = op.dimE();
  for (int i = 0; i < dimE; ++i) {
    std::vector<std::int64_t> e(dimE, 0);
    e[i] = 1;
    out.push_back(std::move(e));
  }
  if (const auto* t = std::get_if<TensorStructure>(&op.structure())) {
    std::vector<std::vector<std::int64_t>> lhs, rhs;
    for (int i = 0; i < t->rows; ++i) {
      std::vector<std::int64_t> a(t->rows, 0);
      a[i] = 1;
      lhs.push_back(std::move(a));
    }
    for (int i = 0; i < t->cols; ++i) {
      std::vector<std::int64_t> b(t->cols, 0);
      b[i] = 1;
      rhs.push_back(std::move(b));
    }
    for (int s = 0; s < random_samples; ++s) {
      lhs.push_back(random_int_vector(t->rows, rng));
      rhs.push_back(random_int_vector(t->cols, rng));
    }
    for (const auto& a : lhs)
      for (const auto& b : rhs) {
        std::vector<std::int64_t> e(static_cast<std::size_t>(t->rows) * t->cols, 0);
        for (int r = 0; r < t->rows; ++r)
          for (int c = 0; c < t->cols; ++c) e[static_cast<std::size_t>(r) * t->cols + c] = a[r] * b[c];
        bool nonzero = std::any_of(e.begin(), e.end(), [](std::int64_t x) { return x != 0; });
        if (nonzero) out.push_back(std::move(e));
      }
  } else if (!std::holds_alternative<ExteriorStructure>(op.structure())) {
    // Unstructured: plain random candidates. Exterior powers need nothing
    // extra here; their coordinate vectors are already the simple e_S.
    for (int s = 0; s < random_samples; ++s) out.push_back(random_int_vector(dimE, rng));
  }
  return out;
}

// ---- singular-value descent -------------------------------------------------

struct DoubleSymbol {
  int d, dimE, dimF;
  std::vector<Eigen::MatrixXd> P;

  explicit DoubleSymbol(const FirstOrderOperator& op) : d(op.d()), dimE(op.dimE()), dimF(op.dimF()) {
    for (int i = 0; i < d; ++i) {
      Eigen::MatrixXd m(dimF, dimE);
      for (int r = 0; r < dimF; ++r)
        for (int c = 0; c < dimE; ++c) m(r, c) = to_double(op.P(i).at(r, c));
      P.push_back(std::move(m));
    }
  }

  double sigma(const Eigen::VectorXd& u, int k) const {
    double norm = u.norm();
    if (norm < 1e-9) return 1e9;
    Eigen::VectorXd e = u / norm;
    Eigen::MatrixXd M(dimF, d);
    for (int i = 0; i < d; ++i) M.col(i) = P[i] * e;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    return k - 1 < s.size() ? s(k - 1) : 0.0;
  }
};

// Compact Nelder-Mead over R^n; the objective normalizes internally.
double nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd& x, int iters) {
  const int n = static_cast<int>(x.size());
  std::vector<Eigen::VectorXd> pts(n + 1, x);
  std::vector<double> val(n + 1);
  for (int i = 1; i <= n; ++i) pts[i](i - 1) += 0.3;
  for (int i = 0; i <= n; ++i) val[i] = f(pts[i]);
  for (int it = 0; it < iters; ++it) {
    std::vector<int> ord(n + 1);
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return val[a] < val[b]; });
    if (val[ord[0]] < 1e-13 || val[ord[n]] - val[ord[0]] < 1e-15) break;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[ord[i]];
    centroid /= n;
    int worst = ord[n];
    Eigen::VectorXd refl = centroid + (centroid - pts[worst]);
    double frefl = f(refl);
    if (frefl < val[ord[0]]) {
      Eigen::VectorXd expd = centroid + 2.0 * (centroid - pts[worst]);
      double fexpd = f(expd);
      if (fexpd < frefl) {
        pts[worst] = expd;
        val[worst] = fexpd;
      } else {
        pts[worst] = refl;
        val[worst] = frefl;
      }
    } else if (frefl < val[ord[n - 1]]) {
      pts[worst] = refl;
      val[worst] = frefl;
    } else {
      Eigen::VectorXd contr = centroid + 0.5 * (pts[worst] - centroid);
      double fcontr = f(contr);
      if (fcontr < val[worst]) {
        pts[worst] = contr;
        val[worst] = fcontr;
      } else {
        for (int i = 1; i <= n; ++i) {
          pts[ord[i]] = pts[ord[0]] + 0.5 * (pts[ord[i]] - pts[ord[0]]);
          val[ord[i]] = f(pts[ord[i]]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (val[i] < val[best]) best = i;
  x = pts[best];
  return val[best];
}

}  // namespace

EllCertificate ell(const FirstOrderOperator& op, const EllConfig& config) {
  std::mt19937_64 rng(config.seed);
  EllCertificate cert;
  cert.log.seed = config.seed;
  cert.log.lattice_height = config.lattice_height;

  int best = INT_MAX;
  std::vector<std::int64_t> best_int;
  RationalVector best_rat;

  // Stage 1: structured candidates.
  for (const auto& e : structured_candidates(op, config.random_samples, rng)) {
    ++cert.log.structured_candidates;
    int r = exact_rank(op, e);
    if (r < best) {
      best = r;
      best_int = e;
    }
  }

  // Stage 2: exhaustive projective lattice when it fits.
  std::uint64_t lattice_min = INT_MAX;
  if (config.lattice_height >= 1 && lattice_fits(op, config.lattice_height)) {
    ScanResult scan = scan_lattice(op, config.lattice_height, /*canonical=*/true);
    cert.log.lattice_candidates = scan.examined;
    cert.log.lattice_exhausted = true;
    if (scan.found) {
      lattice_min = static_cast<std::uint64_t>(scan.best);
      if (scan.best <= best) {
        // Tie-break: the lattice's lexicographically smallest minimizer wins.
        best = scan.best;
        best_int = scan.witness;
      }
    }
  }

  if (!best_int.empty()) {
    best_rat.assign(best_int.size(), Rational(0));
    for (std::size_t i = 0; i < best_int.size(); ++i) best_rat[i] = best_int[i];
  }

  // Stage 3: singular-value descents, kept only when the rationalized
  // minimizer strictly improves under an exact rank check.
  cert.log.descent_restarts = config.descent_restarts;
  if (config.descent_restarts > 0 && best > 0 && op.dimE() >= 2) {
    DoubleSymbol ds(op);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int restart = 0; restart < config.descent_restarts; ++restart) {
      Eigen::VectorXd u(op.dimE());
      for (int i = 0; i < op.dimE(); ++i) u(i) = gauss(rng);
      if (u.norm() < 1e-9) continue;
      u.normalize();
      int target = best;  // drive sigma_best to zero to reach rank <= best-1
      double fmin = nelder_mead([&](const Eigen::VectorXd& x) { return ds.sigma(x, target); }, u,
                                300 + 80 * op.dimE());
      if (fmin >= 1e-10) continue;
      double norm = u.norm();
      if (norm < 1e-9) continue;
      RationalVector e(op.dimE());
      bool nonzero = false;
      for (int i = 0; i < op.dimE(); ++i) {
        e[i] = rationalize(u(i) / norm, 10'000);
        nonzero = nonzero || e[i] != 0;
      }
      if (!nonzero) continue;
      int r = rank(symbol_matrix(op, e).M);
      if (r < best) {
        best = r;
        best_rat = e;
        best_int.clear();
        ++cert.log.descent_accepted;
      }
    }
  }

  if (best_rat.empty()) throw std::logic_error("ell search produced no candidate");

  cert.value = best;
  cert.witness = best_rat;
  cert.invariance = invariance_space(op, cert.witness);
  if (cert.invariance.dim() != cert.value) throw std::logic_error("certificate rank verification failed");

  cert.mode = CertMode::certified_upper_bound;
  if (cert.log.lattice_exhausted && lattice_min == static_cast<std::uint64_t>(best))
    cert.mode = CertMode::lattice_exhausted;
  if (op.analytic_ell() && *op.analytic_ell() == best) cert.mode = CertMode::analytic;
  return cert;
}

int ell_bruteforce_oracle(const FirstOrderOperator& op, int height) {
  if (height < 1) throw std::invalid_argument("height must be >= 1");
  if (!lattice_fits(op, height)) throw std::invalid_argument("lattice too large");
  ScanResult scan = scan_lattice(op, height, /*canonical=*/false);
  if (!scan.found) throw std::logic_error("empty lattice scan");
  return scan.best;
}

}  // namespace wavecone
