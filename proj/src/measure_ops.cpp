#include "wavecone/measure_ops.hpp"

#include "wavecone/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace wavecone {

namespace {

std::vector<std::vector<double>> orthonormal_rows(const Subspace& V) {
  int d = V.ambient_dim();
  std::vector<std::vector<double>> u;
  for (int r = 0; r < V.dim(); ++r) {
    std::vector<double> v = to_double_vector(V.basis_row(r));
    for (const auto& prev : u) {
      double dot = 0;
      for (int k = 0; k < d; ++k) dot += v[k] * prev[k];
      for (int k = 0; k < d; ++k) v[k] -= dot * prev[k];
    }
    double norm = 0;
    for (int k = 0; k < d; ++k) norm += v[k] * v[k];
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw std::logic_error("degenerate subspace basis");
    for (int k = 0; k < d; ++k) v[k] /= norm;
    u.push_back(std::move(v));
  }
  return u;
}

// RREF rows of axis-aligned subspaces are exact unit vectors.
bool is_axis_aligned(const Subspace& V) {
  for (int r = 0; r < V.dim(); ++r) {
    int nonzero = 0;
    RationalVector row = V.basis_row(r);
    for (const auto& x : row)
      if (x != 0) {
        ++nonzero;
        if (x != 1 && x != -1) return false;
      }
    if (nonzero != 1) return false;
  }
  return true;
}

}  // namespace

GridMeasure plane_measure(int d, const Subspace& V, int n, double h) {
  if (V.ambient_dim() != d) throw std::invalid_argument("subspace ambient dimension mismatch");
  GridMeasure g(d, n, h);
  int ell = V.dim();
  if (ell == 0) {
    std::vector<int> center(d, n / 2);
    g.mass[g.flat_index(center)] = 1.0;
    return g;
  }

  const double s = h / 2;
  const double L = g.half_side();

  if (is_axis_aligned(V)) {
    // Product structure: per-axis sample weights on the in-plane axes, the
    // off-plane coordinates pinned to the cell containing 0.
    std::vector<int> in_plane;
    for (int r = 0; r < V.dim(); ++r) {
      RationalVector row = V.basis_row(r);
      for (int k = 0; k < d; ++k)
        if (row[k] != 0) in_plane.push_back(k);
    }
    std::vector<std::vector<double>> axis_weight(d);
    for (int k : in_plane) {
      axis_weight[k].assign(n, 0.0);
      for (int t = -n; t <= n; ++t) {
        double y = t * s;
        if (std::fabs(y) > L + 1e-12) continue;
        axis_weight[k][g.axis_cell(k, y)] += s;
      }
    }
    std::vector<int> idx(d, 0);
    std::vector<bool> in(d, false);
    for (int k : in_plane) in[k] = true;
    for (int k = 0; k < d; ++k)
      if (!in[k]) idx[k] = g.axis_cell(k, 0.0);
    // Odometer over the in-plane axes only.
    std::vector<int> pos(in_plane.size(), 0);
    for (;;) {
      double w = 1;
      for (std::size_t q = 0; q < in_plane.size(); ++q) {
        idx[in_plane[q]] = pos[q];
        w *= axis_weight[in_plane[q]][pos[q]];
      }
      if (w > 0) g.mass[g.flat_index(idx)] += w;
      int q = static_cast<int>(in_plane.size()) - 1;
      while (q >= 0 && ++pos[q] == n) {
        pos[q] = 0;
        --q;
      }
      if (q < 0) break;
    }
    return g;
  }

  auto basis = orthonormal_rows(V);
  int T = static_cast<int>(std::ceil(n * std::sqrt(static_cast<double>(d)))) + 1;
  std::vector<int> t(ell, -T);
  std::vector<double> y(d);
  std::vector<int> idx(d);
  double w = 1;
  for (int q = 0; q < ell; ++q) w *= s;
  for (;;) {
    std::fill(y.begin(), y.end(), 0.0);
    for (int q = 0; q < ell; ++q)
      for (int k = 0; k < d; ++k) y[k] += t[q] * s * basis[q][k];
    bool inside = true;
    for (int k = 0; k < d && inside; ++k) inside = std::fabs(y[k]) <= L + 1e-12;
    if (inside) {
      for (int k = 0; k < d; ++k) idx[k] = g.axis_cell(k, y[k]);
      g.mass[g.flat_index(idx)] += w;
    }
    int q = ell - 1;
    while (q >= 0 && ++t[q] > T) {
      t[q] = -T;
      --q;
    }
    if (q < 0) break;
  }
  return g;
}

VectorGridMeasure sharp_measure(const FirstOrderOperator& op, const EllCertificate& cert, int n, double h) {
  if (is_zero_vector(cert.witness)) throw std::invalid_argument("certificate witness is zero");
  if (static_cast<int>(cert.witness.size()) != op.dimE())
    throw std::invalid_argument("certificate witness has wrong length");
  VectorGridMeasure mu;
  mu.base = plane_measure(op.d(), cert.invariance, n, h);
  mu.dimE = op.dimE();
  mu.constant_polar = true;
  mu.polar = to_double_vector(cert.witness);
  double norm = 0;
  for (double x : mu.polar) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : mu.polar) x /= norm;
  return mu;
}

double weak_residual(const FirstOrderOperator& op, const VectorGridMeasure& mu, const ResidualOptions& opts) {
  const GridMeasure& g = mu.base;
  if (mu.dimE != op.dimE()) throw std::invalid_argument("measure dimE does not match the operator");
  const int d = g.d;
  if (d != op.d()) throw std::invalid_argument("measure dimension does not match the operator");
  const double L = g.half_side();

  std::vector<std::vector<double>> Pd(d), P0d;
  auto to_dense = [&](const RationalMatrix& m) {
    std::vector<double> out(static_cast<std::size_t>(m.rows()) * m.cols());
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r) * m.cols() + c] = to_double(m.at(r, c));
    return out;
  };
  for (int i = 0; i < d; ++i) Pd[i] = to_dense(op.P(i));
  std::vector<double> P0 = to_dense(op.P0());
  const int dimF = op.dimF();
  const int dimE = op.dimE();
  bool p0_zero = op.P0().is_zero();

  // Constant polar: P_i mu(cell) = mass * (P_i polar), precomputed once.
  std::vector<std::vector<double>> pe(d);
  std::vector<double> p0e;
  if (mu.constant_polar) {
    for (int i = 0; i < d; ++i) {
      pe[i].assign(dimF, 0.0);
      for (int r = 0; r < dimF; ++r)
        for (int c = 0; c < dimE; ++c) pe[i][r] += Pd[i][static_cast<std::size_t>(r) * dimE + c] * mu.polar[c];
    }
    p0e.assign(dimF, 0.0);
    for (int r = 0; r < dimF; ++r)
      for (int c = 0; c < dimE; ++c) p0e[r] += P0[static_cast<std::size_t>(r) * dimE + c] * mu.polar[c];
  }

  std::mt19937_64 rng(opts.seed);
  double worst = 0;
  std::vector<double> acc(dimF), pcell(dimF), center(d), x(d), grad(d);
  for (double r : opts.radii) {
    double margin = L - r - 2 * g.h;
    if (margin <= 0) throw std::invalid_argument("test support exceeding the grid");
    std::uniform_real_distribution<double> where(-margin, margin);
    for (int c = 0; c < opts.centers_per_radius; ++c) {
      for (int k = 0; k < d; ++k) center[k] = g.origin[k] + where(rng);
      std::fill(acc.begin(), acc.end(), 0.0);

      std::vector<int> lo(d), hi(d), idx(d);
      for (int k = 0; k < d; ++k) {
        lo[k] = g.axis_cell(k, center[k] - r);
        hi[k] = g.axis_cell(k, center[k] + r);
        idx[k] = lo[k];
      }
      for (;;) {
        std::size_t flat = g.flat_index(idx);
        double m = g.mass[flat];
        if (m > 0) {
          double t2 = 0;
          for (int k = 0; k < d; ++k) {
            x[k] = g.axis_center(k, idx[k]) - center[k];
            t2 += x[k] * x[k];
          }
          t2 /= r * r;
          if (t2 < 1.0) {
            double one = 1.0 - t2;
            double psi = one * one * one;
            double gscale = -6.0 * one * one / (r * r);
            for (int k = 0; k < d; ++k) grad[k] = gscale * x[k];
            if (mu.constant_polar) {
              for (int k = 0; k < d; ++k) {
                double w = m * grad[k];
                if (w != 0)
                  for (int f = 0; f < dimF; ++f) acc[f] += w * pe[k][f];
              }
              if (!p0_zero)
                for (int f = 0; f < dimF; ++f) acc[f] -= m * psi * p0e[f];
            } else {
              std::span<const double> pol = mu.polar_at(flat);
              for (int k = 0; k < d; ++k) {
                std::fill(pcell.begin(), pcell.end(), 0.0);
                for (int f = 0; f < dimF; ++f) {
                  double s = 0;
                  for (int c2 = 0; c2 < dimE; ++c2) s += Pd[k][static_cast<std::size_t>(f) * dimE + c2] * pol[c2];
                  acc[f] += m * grad[k] * s;
                }
              }
              if (!p0_zero)
                for (int f = 0; f < dimF; ++f) {
                  double s = 0;
                  for (int c2 = 0; c2 < dimE; ++c2) s += P0[static_cast<std::size_t>(f) * dimE + c2] * pol[c2];
                  acc[f] -= m * psi * s;
                }
            }
          }
        }
        int k = d - 1;
        while (k >= 0 && ++idx[k] > hi[k]) {
          idx[k] = lo[k];
          --k;
        }
        if (k < 0) break;
      }
      for (int f = 0; f < dimF; ++f) worst = std::max(worst, std::fabs(acc[f]));
    }
  }
  return worst;
}

BlowupResult blowup(const GridMeasure& mu, std::span<const double> x, double r, int n_out) {
  if (static_cast<int>(x.size()) != mu.d) throw std::invalid_argument("blow-up center has wrong length");
  if (!(r > 0)) throw std::invalid_argument("blow-up radius must be positive");
  const double L = mu.half_side();
  for (int k = 0; k < mu.d; ++k)
    if (std::fabs(x[k] - mu.origin[k]) + r > L + 1e-9) throw std::invalid_argument("ball exceeding domain");

  GridMeasure out(mu.d, n_out, 2.0 / n_out);

  std::vector<int> lo(mu.d), hi(mu.d), idx(mu.d);
  for (int k = 0; k < mu.d; ++k) {
    lo[k] = mu.axis_cell(k, x[k] - r);
    hi[k] = mu.axis_cell(k, x[k] + r);
    idx[k] = lo[k];
  }
  // Mass-conserving binning of source cells clipped to [x - r, x + r].
  std::vector<std::pair<int, int>> trange(mu.d);
  std::vector<std::vector<double>> tfrac(mu.d);
  for (;;) {
    double m = mu.mass[mu.flat_index(idx)];
    if (m > 0) {
      double weight_all = 1.0;
      bool any = true;
      for (int k = 0; k < mu.d && any; ++k) {
        double src0 = mu.origin[k] - L + idx[k] * mu.h;
        double src1 = src0 + mu.h;
        double a = std::max((std::max(src0, x[k] - r) - x[k]) / r, -1.0);
        double b = std::min((std::min(src1, x[k] + r) - x[k]) / r, 1.0);
        if (b <= a) {
          any = false;
          break;
        }
        weight_all *= (b - a) * r / mu.h;  // retained volume fraction of the cell
        int t0 = out.axis_cell(k, a + 1e-15);
        int t1 = out.axis_cell(k, b - 1e-15);
        trange[k] = {t0, t1};
        auto& f = tfrac[k];
        f.assign(t1 - t0 + 1, 0.0);
        for (int t = t0; t <= t1; ++t) {
          double cell0 = -1.0 + t * out.h;
          double cell1 = cell0 + out.h;
          f[t - t0] = std::max(0.0, (std::min(cell1, b) - std::max(cell0, a)) / (b - a));
        }
      }
      if (any) {
        std::vector<int> tr(mu.d);
        for (int k = 0; k < mu.d; ++k) tr[k] = trange[k].first;
        for (;;) {
          double w = weight_all;
          for (int k = 0; k < mu.d; ++k) w *= tfrac[k][tr[k] - trange[k].first];
          if (w > 0) out.mass[out.flat_index(tr)] += m * w;
          int k = mu.d - 1;
          while (k >= 0 && ++tr[k] > trange[k].second) {
            tr[k] = trange[k].first;
            --k;
          }
          if (k < 0) break;
        }
      }
    }
    int k = mu.d - 1;
    while (k >= 0 && ++idx[k] > hi[k]) {
      idx[k] = lo[k];
      --k;
    }
    if (k < 0) break;
  }

  double resampled_total = out.total_mass();

  // Restrict to the closed unit ball at cell-center granularity, normalize.
  double total = 0;
  for (std::size_t flat = 0; flat < out.cell_count(); ++flat) {
    if (out.mass[flat] == 0) continue;
    auto oidx = out.unflatten(flat);
    double n2 = 0;
    for (int k = 0; k < out.d; ++k) {
      double c = out.axis_center(k, oidx[k]);
      n2 += c * c;
    }
    if (n2 > 1.0 + 1e-12) {
      out.mass[flat] = 0;
    } else {
      total += out.mass[flat];
    }
  }
  if (!(total > 0)) throw std::invalid_argument("zero mass in the ball");
  for (double& m : out.mass) m /= total;

  BlowupResult res;
  res.center.assign(x.begin(), x.end());
  res.radius = r;
  res.resampled_total = resampled_total;
  res.measure = std::move(out);
  return res;
}

namespace {

std::vector<std::vector<long long>> primitive_directions(const Subspace& V) {
  std::vector<std::vector<long long>> dirs;
  for (int r = 0; r < V.dim(); ++r) {
    RationalVector row = V.basis_row(r);
    BigInt lcm = 1;
    for (const auto& q : row) {
      BigInt den = denominator(q);
      lcm = lcm / gcd(lcm, den) * den;
    }
    std::vector<BigInt> w;
    BigInt g = 0;
    for (const auto& q : row) {
      BigInt v = numerator(Rational(q * lcm));
      w.push_back(v);
      g = gcd(g, abs(v));
    }
    if (g == 0) continue;
    std::vector<long long> out;
    bool ok = true;
    for (const auto& v : w) {
      BigInt red = v / g;
      if (red > 1'000'000 || red < -1'000'000) {
        ok = false;
        break;
      }
      out.push_back(red.convert_to<long long>());
    }
    if (ok) dirs.push_back(std::move(out));
  }
  return dirs;
}

double defect_for_shift(const GridMeasure& g, const std::vector<long long>& t) {
  std::vector<int> lo(g.d), hi(g.d), idx(g.d);
  long long shift_flat = 0;
  for (int k = 0; k < g.d; ++k) {
    long long tk = t[k];
    lo[k] = static_cast<int>(std::max<long long>(0, -tk));
    hi[k] = static_cast<int>(std::min<long long>(g.n - 1, g.n - 1 - tk));
    if (lo[k] > hi[k]) return 2.0;
    idx[k] = lo[k];
    shift_flat = shift_flat * g.n + tk;
  }
  auto shifted = [&](std::size_t flat) {
    return static_cast<std::size_t>(static_cast<long long>(flat) + shift_flat);
  };
  double sum_a = 0, sum_b = 0;
  for (;;) {
    std::size_t flat = g.flat_index(idx);
    sum_a += g.mass[flat];
    sum_b += g.mass[shifted(flat)];
    int k = g.d - 1;
    while (k >= 0 && ++idx[k] > hi[k]) {
      idx[k] = lo[k];
      --k;
    }
    if (k < 0) break;
  }
  if (sum_a == 0 && sum_b == 0) return 0.0;
  if (sum_a == 0 || sum_b == 0) return 2.0;
  double dist = 0;
  for (int k = 0; k < g.d; ++k) idx[k] = lo[k];
  for (;;) {
    std::size_t flat = g.flat_index(idx);
    dist += std::fabs(g.mass[flat] / sum_a - g.mass[shifted(flat)] / sum_b);
    int k = g.d - 1;
    while (k >= 0 && ++idx[k] > hi[k]) {
      idx[k] = lo[k];
      --k;
    }
    if (k < 0) break;
  }
  return dist;
}

}  // namespace

double invariance_defect(const GridMeasure& mu, const Subspace& V, std::uint64_t seed) {
  if (V.ambient_dim() != mu.d) throw std::invalid_argument("subspace ambient dimension mismatch");
  if (V.dim() < 1) throw std::invalid_argument("invariance_defect needs dim V >= 1");
  auto dirs = primitive_directions(V);
  long long max_cells = mu.n / 4;

  std::vector<std::vector<long long>> shifts;
  auto push_if_admissible = [&](std::vector<long long> t) {
    long long linf = 0;
    bool zero = true;
    for (long long v : t) {
      linf = std::max(linf, std::llabs(v));
      zero = zero && v == 0;
    }
    if (!zero && linf <= max_cells) shifts.push_back(std::move(t));
  };
  for (const auto& w : dirs)
    for (long long j = 1;; j *= 2) {
      long long linf = 0;
      for (long long v : w) linf = std::max(linf, std::llabs(v));
      if (j * linf > max_cells) break;
      std::vector<long long> t(w.size());
      for (std::size_t k = 0; k < w.size(); ++k) t[k] = j * w[k];
      push_if_admissible(std::move(t));
    }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coeff(-2, 2);
  for (int trial = 0; trial < 4 && dirs.size() > 1; ++trial) {
    std::vector<long long> t(mu.d, 0);
    for (const auto& w : dirs) {
      int c = coeff(rng);
      for (int k = 0; k < mu.d; ++k) t[k] += c * w[k];
    }
    push_if_admissible(std::move(t));
  }
  if (shifts.empty()) return 2.0;  // unverifiable at this resolution

  double worst = 0;
  for (const auto& t : shifts) worst = std::max(worst, defect_for_shift(mu, t));
  return worst;
}

Subspace detect_invariance(const GridMeasure& mu, double tol, std::uint64_t seed) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  const int d = mu.d;
  // Candidate directions: primitive height <= 2 lattice vectors, canonical
  // sign, ordered by height then lexicographically.
  std::vector<std::vector<long long>> candidates;
  std::vector<long long> v(d, -2);
  for (;;) {
    long long g = 0, first = 0;
    for (long long x : v) {
      g = std::gcd(g, std::llabs(x));
      if (first == 0) first = x;
    }
    if (g == 1 && first > 0) candidates.push_back(v);
    int k = d - 1;
    while (k >= 0 && ++v[k] > 2) {
      v[k] = -2;
      --k;
    }
    if (k < 0) break;
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    long long ha = 0, hb = 0;
    for (long long x : a) ha = std::max(ha, std::llabs(x));
    for (long long x : b) hb = std::max(hb, std::llabs(x));
    return ha < hb;
  });

  Subspace S = Subspace::zero(d);
  for (const auto& cand : candidates) {
    if (S.dim() == d) break;
    RationalVector rv(d);
    for (int k = 0; k < d; ++k) rv[k] = cand[k];
    if (S.contains(rv)) continue;
    Subspace line = Subspace::span_of(d, {rv});
    if (invariance_defect(mu, line, seed) > tol) continue;
    Subspace grown = S.sum(line);
    if (S.dim() == 0 || invariance_defect(mu, grown, seed) <= tol) S = grown;
  }
  return S;
}

std::vector<std::pair<double, double>> upper_density(const GridMeasure& mu, std::span<const double> x,
                                                     double kappa, std::span<const double> radii) {
  if (static_cast<int>(x.size()) != mu.d) throw std::invalid_argument("density center has wrong length");
  if (kappa < 0 || kappa > mu.d) throw std::invalid_argument("kappa must lie in [0, d]");
  const double L = mu.half_side();
  for (int k = 0; k < mu.d; ++k)
    if (std::fabs(x[k] - mu.origin[k]) > L) throw std::invalid_argument("x outside grid");
  std::vector<std::pair<double, double>> out;
  std::vector<double> lo(mu.d), hi(mu.d);
  for (double r : radii) {
    if (!(r > 0)) throw std::invalid_argument("radii must be positive");
    for (int k = 0; k < mu.d; ++k) {
      if (std::fabs(x[k] - mu.origin[k]) + r > L + 1e-12) throw std::invalid_argument("radius exceeds the domain");
      lo[k] = x[k] - r;
      hi[k] = x[k] + r;
    }
    out.emplace_back(r, mu.box_mass(lo, hi) / std::pow(r, kappa));
  }
  return out;
}

BoxDimEstimate box_dimension(const GridMeasure& mu, int num_scales, double mass_threshold,
                             const std::vector<std::uint8_t>* cell_mask) {
  if (!(mass_threshold > 0) || !(mass_threshold < 1))
    throw std::invalid_argument("mass_threshold must lie in (0,1)");
  if (cell_mask && cell_mask->size() != mu.cell_count())
    throw std::invalid_argument("mask size does not match the grid");

  std::vector<int> sizes;
  for (int b = mu.n / 2; b >= 1 && static_cast<int>(sizes.size()) < num_scales; b /= 2) sizes.push_back(b);
  if (static_cast<int>(sizes.size()) < 4) throw std::invalid_argument("grid too coarse for requested scales");

  double total = 0;
  for (std::size_t flat = 0; flat < mu.cell_count(); ++flat)
    if (!cell_mask || (*cell_mask)[flat]) total += mu.mass[flat];

  BoxDimEstimate est;
  if (!(total > 0)) {
    est.degenerate = true;
    return est;
  }

  for (int b : sizes) {
    int per_axis = (mu.n + b - 1) / b;
    std::size_t num_boxes = 1;
    for (int k = 0; k < mu.d; ++k) num_boxes *= static_cast<std::size_t>(per_axis);
    std::vector<double> boxes(num_boxes, 0.0);
    std::vector<int> idx(mu.d, 0);
    for (std::size_t flat = 0; flat < mu.cell_count(); ++flat) {
      double m = (!cell_mask || (*cell_mask)[flat]) ? mu.mass[flat] : 0.0;
      if (m > 0) {
        auto cidx = mu.unflatten(flat);
        std::size_t box = 0;
        for (int k = 0; k < mu.d; ++k) box = box * per_axis + static_cast<std::size_t>(cidx[k] / b);
        boxes[box] += m;
      }
    }
    double share = mass_threshold * total / static_cast<double>(num_boxes);
    std::uint64_t count = 0;
    for (double bm : boxes)
      if (bm >= share) ++count;
    est.scale_counts.emplace_back(b * mu.h, count);
  }

  bool all_equal = true;
  for (const auto& [eps, count] : est.scale_counts) all_equal = all_equal && count == est.scale_counts[0].second;
  est.degenerate = all_equal;

  // Least-squares slope of log N against log(1/eps).
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n_pts = static_cast<double>(est.scale_counts.size());
  for (const auto& [eps, count] : est.scale_counts) {
    double X = std::log(1.0 / eps);
    double Y = std::log(static_cast<double>(std::max<std::uint64_t>(count, 1)));
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
    syy += Y * Y;
  }
  double denom = n_pts * sxx - sx * sx;
  est.estimate = (n_pts * sxy - sx * sy) / denom;
  double ss_tot = syy - sy * sy / n_pts;
  if (ss_tot <= 1e-30) {
    est.r2 = 1.0;  // exact horizontal fit
  } else {
    double ss_res = 0;
    double intercept = (sy - est.estimate * sx) / n_pts;
    for (const auto& [eps, count] : est.scale_counts) {
      double X = std::log(1.0 / eps);
      double Y = std::log(static_cast<double>(std::max<std::uint64_t>(count, 1)));
      double e = Y - (est.estimate * X + intercept);
      ss_res += e * e;
    }
    est.r2 = 1.0 - ss_res / ss_tot;
  }
  return est;
}

namespace {

// Rationalized polar lookup shared by the per-cell exact tests.
struct PolarClassifier {
  const FirstOrderOperator& op;
  std::map<std::vector<std::pair<long long, long long>>, int> memo;  // rank by rationalized polar

  explicit PolarClassifier(const FirstOrderOperator& o) : op(o) {}

  // Returns rank M(e) for the rationalized polar, or -1 when it rounds to zero.
  int rank_of(std::span<const double> polar) {
    std::vector<std::pair<long long, long long>> key;
    key.reserve(polar.size());
    RationalVector e(polar.size());
    bool nonzero = false;
    for (std::size_t i = 0; i < polar.size(); ++i) {
      e[i] = rationalize(polar[i], 1000);
      key.emplace_back(numerator(e[i]).convert_to<long long>(), denominator(e[i]).convert_to<long long>());
      nonzero = nonzero || e[i] != 0;
    }
    if (!nonzero) return -1;
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    int r = rank(symbol_matrix(op, e).M);
    memo.emplace(std::move(key), r);
    return r;
  }
};

}  // namespace

std::vector<std::uint8_t> wave_cone_mask(const FirstOrderOperator& op, const VectorGridMeasure& mu) {
  if (mu.dimE != op.dimE()) throw std::invalid_argument("measure dimE does not match the operator");
  std::vector<std::uint8_t> mask(mu.base.cell_count(), 0);
  if (mu.constant_polar) {
    PolarClassifier cls(op);
    int r = cls.rank_of({mu.polar.data(), mu.polar.size()});
    std::uint8_t marked = (r >= 0 && r >= op.d()) ? 1 : 0;  // outside the wave cone iff rank = d
    for (std::size_t flat = 0; flat < mask.size(); ++flat)
      if (mu.base.mass[flat] > 0) mask[flat] = marked;
    return mask;
  }
  unsigned workers = thread_budget();
  std::size_t count = mu.base.cell_count();
  std::size_t chunk = (count + workers - 1) / workers;
  parallel_tasks(workers, [&](std::size_t w) {
    PolarClassifier cls(op);
    std::size_t lo = w * chunk, hi = std::min(count, lo + chunk);
    for (std::size_t flat = lo; flat < hi; ++flat) {
      if (mu.base.mass[flat] <= 0) continue;
      int r = cls.rank_of(mu.polar_at(flat));
      mask[flat] = (r >= 0 && r >= op.d()) ? 1 : 0;
    }
  });
  return mask;
}

std::vector<int> pointwise_invariance_dim(const FirstOrderOperator& op, const VectorGridMeasure& mu) {
  if (mu.dimE != op.dimE()) throw std::invalid_argument("measure dimE does not match the operator");
  std::vector<int> dims(mu.base.cell_count(), -1);
  if (mu.constant_polar) {
    PolarClassifier cls(op);
    int r = cls.rank_of({mu.polar.data(), mu.polar.size()});
    for (std::size_t flat = 0; flat < dims.size(); ++flat)
      if (mu.base.mass[flat] > 0) dims[flat] = r;
    return dims;
  }
  unsigned workers = thread_budget();
  std::size_t count = mu.base.cell_count();
  std::size_t chunk = (count + workers - 1) / workers;
  parallel_tasks(workers, [&](std::size_t w) {
    PolarClassifier cls(op);
    std::size_t lo = w * chunk, hi = std::min(count, lo + chunk);
    for (std::size_t flat = lo; flat < hi; ++flat) {
      if (mu.base.mass[flat] <= 0) continue;
      dims[flat] = cls.rank_of(mu.polar_at(flat));
    }
  });
  return dims;
}

}  // namespace wavecone
