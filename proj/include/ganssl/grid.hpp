#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <vector>

#include "ganssl/common.hpp"

namespace ganssl {

// Uniform 1D or 2D grid; densities live at cell midpoints.
struct GridSpec {
  int dims = 1;
  std::array<double, 2> lower{0.0, 0.0};
  std::array<double, 2> upper{1.0, 1.0};
  std::array<std::size_t, 2> cells{2, 1};

  static GridSpec line(double lo, double hi, std::size_t n);
  static GridSpec plane(double lo_x, double hi_x, double lo_y, double hi_y,
                        std::size_t nx, std::size_t ny);

  std::size_t cell_count() const {
    return dims == 1 ? cells[0] : cells[0] * cells[1];
  }
  double width(int d) const {
    return (upper[static_cast<std::size_t>(d)] - lower[static_cast<std::size_t>(d)]) /
           static_cast<double>(cells[static_cast<std::size_t>(d)]);
  }
  double cell_measure() const {
    return dims == 1 ? width(0) : width(0) * width(1);
  }
  double midpoint(int d, std::size_t i) const {
    return lower[static_cast<std::size_t>(d)] +
           (static_cast<double>(i) + 0.5) * width(d);
  }
  // Flat index is x-major: idx = ix * cells[1] + iy.
  std::array<double, 2> midpoint_2d(std::size_t flat) const {
    return {midpoint(0, flat / cells[1]), midpoint(1, flat % cells[1])};
  }
  bool operator==(const GridSpec&) const = default;

  void validate() const;
};

// Non-negative density discretized on a grid; normalize() makes
// sum(values) * cell_measure == 1.
struct GridDensity {
  GridSpec grid;
  std::vector<double> values;

  double mass() const;
  void normalize();
  // values >= 0, mass within 1e-6 of 1, bounds ordered.
  void check_invariants() const;

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

// Midpoint discretization of a non-negative pdf, renormalized on the grid.
GridDensity discretize(const std::function<double(double)>& pdf,
                       const GridSpec& grid);
GridDensity discretize_2d(const std::function<double(double, double)>& pdf,
                          const GridSpec& grid);

// Mass of the raw midpoint sums before renormalization (testing hook).
double midpoint_mass(const std::function<double(double)>& pdf,
                     const GridSpec& grid);

void require_same_grid(const GridDensity& a, const GridDensity& b,
                       const char* where);

// CSV: header "x,density" (1D) or "x,y,density" (2D), one row per cell
// midpoint, 17 significant digits, LF endings.
void write_density_csv(const GridDensity& density, const std::filesystem::path& path);
GridDensity read_density_csv(const std::filesystem::path& path);

}  // namespace ganssl
