#include "wavecone/grid.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace wavecone {

namespace {

void write_doubles(const std::filesystem::path& path, std::span<const double> data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  f.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::vector<double> read_doubles(const std::filesystem::path& path, std::size_t count) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path.string());
  std::vector<double> data(count);
  f.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (static_cast<std::size_t>(f.gcount()) != count * sizeof(double))
    throw std::runtime_error("short read: " + path.string());
  return data;
}

nlohmann::json load_header(const std::filesystem::path& dir) {
  std::ifstream f(dir / "header.json");
  if (!f) throw std::runtime_error("cannot open " + (dir / "header.json").string());
  nlohmann::json j;
  f >> j;
  if (j.value("dtype", std::string{}) != "f64le") throw std::runtime_error("unsupported dtype in measure header");
  return j;
}

}  // namespace

GridMeasure::GridMeasure(int d_, int n_, double h_) : d(d_), n(n_), h(h_), origin(d_, 0.0) {
  if (d < 1 || d > 6) throw std::invalid_argument("grid dimension out of range");
  if (n < 1) throw std::invalid_argument("cells per axis must be positive");
  if (!(h > 0)) throw std::invalid_argument("cell width must be positive");
  std::size_t count = 1;
  for (int k = 0; k < d; ++k) count *= static_cast<std::size_t>(n);
  mass.assign(count, 0.0);
}

std::size_t GridMeasure::flat_index(std::span<const int> idx) const {
  std::size_t flat = 0;
  for (int k = 0; k < d; ++k) flat = flat * n + static_cast<std::size_t>(idx[k]);
  return flat;
}

std::vector<int> GridMeasure::unflatten(std::size_t flat) const {
  std::vector<int> idx(d);
  for (int k = d - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(flat % n);
    flat /= n;
  }
  return idx;
}

int GridMeasure::axis_cell(int k, double x) const {
  double lo = origin[k] - half_side();
  int i = static_cast<int>(std::floor((x - lo) / h));
  return std::clamp(i, 0, n - 1);
}

double GridMeasure::total_mass() const {
  double s = 0;
  for (double m : mass) s += m;
  return s;
}

double GridMeasure::box_mass(std::span<const double> lo, std::span<const double> hi) const {
  // Per-axis cell ranges and overlap fractions; the box clips to the domain.
  std::vector<int> first(d), last(d);
  std::vector<std::vector<double>> frac(d);
  for (int k = 0; k < d; ++k) {
    double a = origin[k] - half_side();
    double lok = std::max(lo[k], a);
    double hik = std::min(hi[k], a + n * h);
    if (hik <= lok) return 0.0;
    first[k] = std::clamp(static_cast<int>(std::floor((lok - a) / h)), 0, n - 1);
    last[k] = std::clamp(static_cast<int>(std::ceil((hik - a) / h)) - 1, 0, n - 1);
    frac[k].resize(last[k] - first[k] + 1);
    for (int i = first[k]; i <= last[k]; ++i) {
      double c0 = a + i * h, c1 = c0 + h;
      frac[k][i - first[k]] = std::max(0.0, (std::min(c1, hik) - std::max(c0, lok)) / h);
    }
  }
  std::vector<int> idx(first);
  double total = 0;
  for (;;) {
    double w = 1;
    for (int k = 0; k < d; ++k) w *= frac[k][idx[k] - first[k]];
    if (w > 0) total += w * mass[flat_index(idx)];
    int k = d - 1;
    while (k >= 0 && ++idx[k] > last[k]) {
      idx[k] = first[k];
      --k;
    }
    if (k < 0) break;
  }
  return total;
}

void GridMeasure::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nlohmann::json header{{"d", d}, {"n", n}, {"h", h}, {"origin", origin}, {"dtype", "f64le"}};
  std::ofstream f(dir / "header.json");
  f << header.dump(2) << "\n";
  write_doubles(dir / "mass.f64", mass);
}

GridMeasure GridMeasure::load(const std::filesystem::path& dir) {
  nlohmann::json j = load_header(dir);
  GridMeasure g(j.at("d").get<int>(), j.at("n").get<int>(), j.at("h").get<double>());
  g.origin = j.at("origin").get<std::vector<double>>();
  if (static_cast<int>(g.origin.size()) != g.d) throw std::runtime_error("origin length mismatch in header");
  g.mass = read_doubles(dir / "mass.f64", g.cell_count());
  for (double m : g.mass)
    if (!(m >= 0) || !std::isfinite(m)) throw std::runtime_error("measure file holds negative or non-finite mass");
  return g;
}

void VectorGridMeasure::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nlohmann::json header{{"d", base.d}, {"n", base.n},         {"h", base.h},
                        {"origin", base.origin}, {"dtype", "f64le"}, {"dimE", dimE}};
  std::ofstream f(dir / "header.json");
  f << header.dump(2) << "\n";
  write_doubles(dir / "mass.f64", base.mass);
  std::ofstream pf(dir / "polar.f64", std::ios::binary);
  if (!pf) throw std::runtime_error("cannot open for writing: " + (dir / "polar.f64").string());
  if (constant_polar) {
    for (std::size_t c = 0; c < base.cell_count(); ++c)
      pf.write(reinterpret_cast<const char*>(polar.data()), static_cast<std::streamsize>(dimE * sizeof(double)));
  } else {
    pf.write(reinterpret_cast<const char*>(polar.data()), static_cast<std::streamsize>(polar.size() * sizeof(double)));
  }
  if (!pf) throw std::runtime_error("write failed: " + (dir / "polar.f64").string());
}

VectorGridMeasure VectorGridMeasure::load(const std::filesystem::path& dir) {
  nlohmann::json j = load_header(dir);
  if (!j.contains("dimE")) throw std::runtime_error("measure header lacks dimE; not a vector measure");
  VectorGridMeasure v;
  v.base = GridMeasure::load(dir);
  v.dimE = j.at("dimE").get<int>();
  if (v.dimE < 1) throw std::runtime_error("dimE must be positive");
  v.constant_polar = false;
  v.polar = read_doubles(dir / "polar.f64", v.base.cell_count() * static_cast<std::size_t>(v.dimE));
  return v;
}

}  // namespace wavecone
