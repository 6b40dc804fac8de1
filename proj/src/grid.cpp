#include "ganssl/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace ganssl {

GridSpec GridSpec::line(double lo, double hi, std::size_t n) {
  GridSpec g;
  g.dims = 1;
  g.lower = {lo, 0.0};
  g.upper = {hi, 1.0};
  g.cells = {n, 1};
  g.validate();
  return g;
}

GridSpec GridSpec::plane(double lo_x, double hi_x, double lo_y, double hi_y,
                         std::size_t nx, std::size_t ny) {
  GridSpec g;
  g.dims = 2;
  g.lower = {lo_x, lo_y};
  g.upper = {hi_x, hi_y};
  g.cells = {nx, ny};
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (dims != 1 && dims != 2) throw ShapeError("grid: dims must be 1 or 2");
  for (int d = 0; d < dims; ++d) {
    const auto di = static_cast<std::size_t>(d);
    if (!(lower[di] < upper[di])) {
      throw ShapeError("grid: bounds must be strictly ordered");
    }
    if (cells[di] < 2) throw ShapeError("grid: need at least 2 cells per dim");
  }
}

double GridDensity::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.cell_measure();
}

void GridDensity::normalize() {
  const double m = mass();
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw NumericError("normalize: density mass must be positive and finite");
  }
  for (double& v : values) v /= m;
}

void GridDensity::check_invariants() const {
  grid.validate();
  if (values.size() != grid.cell_count()) {
    throw ShapeError("density: value count does not match grid");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw NumericError("density: values must be finite and non-negative");
    }
  }
  const double m = mass();
  if (std::abs(m - 1.0) > 1e-6) {
    throw NumericError("density: mass " + std::to_string(m) +
                       " outside [1-1e-6, 1+1e-6]");
  }
}

GridDensity discretize(const std::function<double(double)>& pdf,
                       const GridSpec& grid) {
  grid.validate();
  if (grid.dims != 1) throw ShapeError("discretize: expected a 1D grid");
  GridDensity d;
  d.grid = grid;
  d.values.resize(grid.cell_count());
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    const double v = pdf(grid.midpoint(0, i));
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DataError("discretize: pdf sample must be finite and >= 0");
    }
    d.values[i] = v;
  }
  d.normalize();
  return d;
}

GridDensity discretize_2d(const std::function<double(double, double)>& pdf,
                          const GridSpec& grid) {
  grid.validate();
  if (grid.dims != 2) throw ShapeError("discretize_2d: expected a 2D grid");
  GridDensity d;
  d.grid = grid;
  d.values.resize(grid.cell_count());
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    const auto [x, y] = grid.midpoint_2d(i);
    const double v = pdf(x, y);
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DataError("discretize_2d: pdf sample must be finite and >= 0");
    }
    d.values[i] = v;
  }
  d.normalize();
  return d;
}

double midpoint_mass(const std::function<double(double)>& pdf,
                     const GridSpec& grid) {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    s += pdf(grid.midpoint(0, i));
  }
  return s * grid.cell_measure();
}

void require_same_grid(const GridDensity& a, const GridDensity& b,
                       const char* where) {
  if (!(a.grid == b.grid)) {
    throw ShapeError(std::string(where) + ": grids do not match");
  }
}

void write_density_csv(const GridDensity& density,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  char buf[64];
  if (density.grid.dims == 1) {
    out << "x,density\n";
    for (std::size_t i = 0; i < density.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", density.grid.midpoint(0, i));
      out << buf << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", density[i]);
      out << buf << '\n';
    }
  } else {
    out << "x,y,density\n";
    for (std::size_t i = 0; i < density.size(); ++i) {
      const auto [x, y] = density.grid.midpoint_2d(i);
      std::snprintf(buf, sizeof(buf), "%.17g", x);
      out << buf << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", y);
      out << buf << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", density[i]);
      out << buf << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

GridDensity read_density_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  std::string header;
  std::getline(in, header);
  const bool two_d = header == "x,y,density";
  if (!two_d && header != "x,density") {
    throw IoError("unrecognized density CSV header in " + path.string());
  }
  std::vector<double> xs, ys, vs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    xs.push_back(std::stod(tok));
    if (two_d) {
      std::getline(ss, tok, ',');
      ys.push_back(std::stod(tok));
    }
    std::getline(ss, tok, ',');
    vs.push_back(std::stod(tok));
  }
  if (vs.size() < 2) throw IoError("density CSV has too few rows: " + path.string());
  GridDensity d;
  if (!two_d) {
    const std::size_t n = vs.size();
    const double dx = (xs.back() - xs.front()) / static_cast<double>(n - 1);
    d.grid = GridSpec::line(xs.front() - dx / 2, xs.back() + dx / 2, n);
  } else {
    std::size_t ny = 1;
    while (ny < vs.size() && xs[ny] == xs[0]) ++ny;
    if (vs.size() % ny != 0) throw IoError("ragged 2D density CSV: " + path.string());
    const std::size_t nx = vs.size() / ny;
    const double dx = nx > 1 ? (xs.back() - xs.front()) / static_cast<double>(nx - 1)
                             : 1.0;
    const double dy = (ys[ny - 1] - ys[0]) / static_cast<double>(ny - 1);
    d.grid = GridSpec::plane(xs.front() - dx / 2, xs.back() + dx / 2,
                             ys.front() - dy / 2, ys[ny - 1] + dy / 2, nx, ny);
  }
  d.values = std::move(vs);
  return d;
}

}  // namespace ganssl
