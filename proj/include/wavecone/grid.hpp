#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace wavecone {

// Nonnegative cell-mass array over the cube [-n h/2, n h/2]^d around `origin`,
// C-order (last index fastest). Box masses count fully covered cells plus
// boundary cells weighted by volume fraction.
struct GridMeasure {
  int d = 0;
  int n = 0;
  double h = 0;
  std::vector<double> origin;  // center of the cube, length d
  std::vector<double> mass;    // n^d values

  GridMeasure() = default;
  GridMeasure(int d_, int n_, double h_);

  std::size_t cell_count() const { return mass.size(); }
  double half_side() const { return 0.5 * n * h; }

  std::size_t flat_index(std::span<const int> idx) const;
  std::vector<int> unflatten(std::size_t flat) const;
  /// Center coordinate of cell index i along axis k.
  double axis_center(int k, int i) const { return origin[k] - half_side() + (i + 0.5) * h; }
  /// Cell index containing coordinate x along axis k, clamped to [0, n-1].
  int axis_cell(int k, double x) const;

  double total_mass() const;
  /// Mass of the axis-aligned box [lo, hi], boundary cells by volume fraction.
  double box_mass(std::span<const double> lo, std::span<const double> hi) const;

  /// Directory layout: header.json plus raw little-endian float64 mass.f64.
  void save(const std::filesystem::path& dir) const;
  static GridMeasure load(const std::filesystem::path& dir);
};

// Total-variation part plus a unit polar vector per supported cell. The polar
// array is either one constant vector (the common constructed case) or a full
// n^d x dimE array; files always store the expanded form.
struct VectorGridMeasure {
  GridMeasure base;
  int dimE = 0;
  bool constant_polar = false;
  std::vector<double> polar;  // dimE values if constant, else n^d * dimE

  std::span<const double> polar_at(std::size_t flat) const {
    if (constant_polar) return {polar.data(), static_cast<std::size_t>(dimE)};
    return {polar.data() + flat * dimE, static_cast<std::size_t>(dimE)};
  }

  void save(const std::filesystem::path& dir) const;
  static VectorGridMeasure load(const std::filesystem::path& dir);
};

}  // namespace wavecone
