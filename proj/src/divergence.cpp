#include "ganssl/divergence.hpp"

#include <cmath>

namespace ganssl {

double kl(const GridDensity& p, const GridDensity& q) {
  require_same_grid(p, q, "kl");
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > kDensityFloor && q[i] < kDensityFloor) {
      throw SupportViolation(i, p[i], q[i], 0.0);
    }
  }
  const double dx = p.grid.cell_measure();
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += xlog_ratio(p[i], q[i]);
  return s * dx;
}

double js(const GridDensity& p, const GridDensity& q) {
  require_same_grid(p, q, "js");
  const double dx = p.grid.cell_measure();
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    s += 0.5 * (xlog_ratio(p[i], m) + xlog_ratio(q[i], m));
  }
  return s * dx;
}

double perturbed_kl(const GridDensity& p, const GridDensity& q, double eps) {
  require_same_grid(p, q, "perturbed_kl");
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw NumericError("perturbed_kl: eps must lie in [0, 1)");
  }
  const double dx = p.grid.cell_measure();
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = p[i] - eps * q[i];
    if (p[i] > kDensityFloor && r < kDensityFloor) {
      throw SupportViolation(i, p[i], q[i], eps);
    }
    s += xlog_ratio(p[i], r);
  }
  return s * dx;
}

ClampedKlResult perturbed_kl_clamped(const GridDensity& p, const GridDensity& q,
                                     double eps) {
  require_same_grid(p, q, "perturbed_kl");
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw NumericError("perturbed_kl: eps must lie in [0, 1)");
  }
  const double dx = p.grid.cell_measure();
  ClampedKlResult out;
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = p[i] - eps * q[i];
    if (p[i] > kDensityFloor && r < kDensityFloor) ++out.clamped_cells;
    s += xlog_ratio(p[i], r);
  }
  out.value = s * dx;
  return out;
}

double total_variation(const GridDensity& p, const GridDensity& q) {
  require_same_grid(p, q, "total_variation");
  const double dx = p.grid.cell_measure();
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s * dx;
}

}  // namespace ganssl
