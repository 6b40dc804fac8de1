#pragma once

#include "ganssl/grid.hpp"

namespace ganssl {

// All divergences use natural log and midpoint quadrature on a shared grid,
// with 0*log(0) := 0 and log arguments clamped at kDensityFloor.

double kl(const GridDensity& p, const GridDensity& q);

double js(const GridDensity& p, const GridDensity& q);

// KL(p || p - eps*q). Strict: throws SupportViolation when p - eps*q falls
// below the floor on a cell where p is above it.
double perturbed_kl(const GridDensity& p, const GridDensity& q, double eps);

struct ClampedKlResult {
  double value = 0.0;
  std::size_t clamped_cells = 0;
};

// Training variant: clamps the perturbed density at the floor instead of
// throwing, and counts the offending cells.
ClampedKlResult perturbed_kl_clamped(const GridDensity& p, const GridDensity& q,
                                     double eps);

double total_variation(const GridDensity& p, const GridDensity& q);

// a * log(a / max(b, floor)), with the 0*log(0) convention.
inline double xlog_ratio(double a, double b) {
  if (a <= 0.0) return 0.0;
  const double denom = b > kDensityFloor ? b : kDensityFloor;
  return a * std::log(a / denom);
}

}  // namespace ganssl
