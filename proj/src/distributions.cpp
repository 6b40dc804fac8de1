#include "ganssl/distributions.hpp"

#include <algorithm>
#include <cmath>

namespace ganssl {

double gaussian_pdf(double mu, double sigma, double x) {
  if (!(sigma > 0.0)) throw DataError("gaussian_pdf: sigma must be positive");
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

std::vector<double> sample_gaussian(Rng& rng, double mu, double sigma,
                                    std::size_t n) {
  if (!(sigma > 0.0)) throw DataError("sample_gaussian: sigma must be positive");
  if (n == 0) throw DataError("sample_gaussian: n must be >= 1");
  std::vector<double> out(n);
  for (double& v : out) v = rng.normal(mu, sigma);
  return out;
}

ManifoldSpec ManifoldSpec::create(std::vector<Disc> discs, int class_count) {
  if (class_count < 1) throw DataError("manifold: class_count must be >= 1");
  for (const Disc& d : discs) {
    if (!(d.radius > 0.0)) throw DataError("manifold: disc radius must be positive");
    if (d.class_index < 1 || d.class_index > class_count) {
      throw DataError("manifold: disc class out of 1..K for disc '" + d.label + "'");
    }
  }
  for (std::size_t i = 0; i < discs.size(); ++i) {
    for (std::size_t j = i + 1; j < discs.size(); ++j) {
      const double dx = discs[i].center[0] - discs[j].center[0];
      const double dy = discs[i].center[1] - discs[j].center[1];
      const double dist = std::sqrt(dx * dx + dy * dy);
      if (!(dist > discs[i].radius + discs[j].radius)) {
        throw DataError("manifold: discs '" + discs[i].label + "' and '" +
                        discs[j].label + "' are not disjoint");
      }
    }
  }
  ManifoldSpec m;
  m.discs = std::move(discs);
  m.class_count = class_count;
  return m;
}

std::optional<std::size_t> ManifoldSpec::locate(double x, double y) const {
  for (std::size_t i = 0; i < discs.size(); ++i) {
    if (discs[i].contains(x, y)) return i;
  }
  return std::nullopt;
}

std::array<double, 2> ManifoldSpec::sample_uniform(Rng& rng) const {
  if (discs.empty()) throw DataError("manifold: no discs to sample");
  double total = 0.0;
  for (const Disc& d : discs) total += d.radius * d.radius;
  double pick = rng.uniform() * total;
  std::size_t idx = discs.size() - 1;
  for (std::size_t i = 0; i < discs.size(); ++i) {
    pick -= discs[i].radius * discs[i].radius;
    if (pick <= 0.0) {
      idx = i;
      break;
    }
  }
  const auto pts = sample_disc_uniform(rng, discs[idx].center, discs[idx].radius, 1);
  return pts[0];
}

std::array<double, 4> ManifoldSpec::bounding_box(double margin) const {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const Disc& d : discs) {
    x0 = std::min(x0, d.center[0] - d.radius);
    x1 = std::max(x1, d.center[0] + d.radius);
    y0 = std::min(y0, d.center[1] - d.radius);
    y1 = std::max(y1, d.center[1] + d.radius);
  }
  return {x0 - margin, x1 + margin, y0 - margin, y1 + margin};
}

std::vector<std::array<double, 2>> sample_disc_uniform(Rng& rng,
                                                       std::array<double, 2> center,
                                                       double radius,
                                                       std::size_t n) {
  if (!(radius > 0.0)) throw DataError("sample_disc_uniform: radius must be positive");
  std::vector<std::array<double, 2>> out(n);
  for (auto& p : out) {
    // Polar with area-correct radius law r = R*sqrt(u).
    const double r = radius * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    p = {center[0] + r * std::cos(theta), center[1] + r * std::sin(theta)};
  }
  return out;
}

void LabeledDataset::push(std::array<double, 2> p, int label, Origin origin,
                          int truth) {
  points.push_back(p);
  labels.push_back(label);
  origins.push_back(origin);
  true_class.push_back(truth);
}

void LabeledDataset::validate(int class_count) const {
  if (labels.size() != points.size() || origins.size() != points.size() ||
      true_class.size() != points.size()) {
    throw ShapeError("dataset: column lengths disagree");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (origins[i] == Origin::labeled) {
      if (labels[i] < 1 || labels[i] > class_count) {
        throw DataError("dataset: labeled point with class outside 1..K");
      }
    } else if (labels[i] != kUnlabeled) {
      throw DataError("dataset: non-labeled point must carry the UNLABELED marker");
    }
  }
}

GridDensity kde_on_grid(std::span<const double> samples, double bandwidth,
                        const GridSpec& grid) {
  if (samples.empty()) throw DataError("kde_on_grid: need at least one sample");
  if (!(bandwidth > 0.0)) throw DataError("kde_on_grid: bandwidth must be positive");
  if (grid.dims != 1) throw ShapeError("kde_on_grid: expected a 1D grid");
  GridDensity d;
  d.grid = grid;
  d.values.assign(grid.cell_count(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  const double norm = inv_n / (bandwidth * std::sqrt(2.0 * std::numbers::pi));
  for (double x : samples) {
    for (std::size_t i = 0; i < d.values.size(); ++i) {
      const double z = (grid.midpoint(0, i) - x) / bandwidth;
      d.values[i] += norm * std::exp(-0.5 * z * z);
    }
  }
  d.normalize();
  return d;
}

GridDensity kde_on_grid_2d(std::span<const std::array<double, 2>> samples,
                           double bandwidth, const GridSpec& grid) {
  if (samples.empty()) throw DataError("kde_on_grid_2d: need at least one sample");
  if (!(bandwidth > 0.0)) throw DataError("kde_on_grid_2d: bandwidth must be positive");
  if (grid.dims != 2) throw ShapeError("kde_on_grid_2d: expected a 2D grid");
  GridDensity d;
  d.grid = grid;
  d.values.assign(grid.cell_count(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  const double norm = inv_n / (2.0 * std::numbers::pi * bandwidth * bandwidth);
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < d.values.size(); ++i) {
      const auto [mx, my] = grid.midpoint_2d(i);
      const double zx = (mx - s[0]) / bandwidth;
      const double zy = (my - s[1]) / bandwidth;
      d.values[i] += norm * std::exp(-0.5 * (zx * zx + zy * zy));
    }
  }
  d.normalize();
  return d;
}

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.size() < 2) throw DataError("silverman_bandwidth: need >= 2 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : sorted) var += (v - mean) * (v - mean);
  var /= (n - 1.0);
  auto quantile = [&](double q) {
    const double pos = q * (n - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double spread = std::min(std::sqrt(var), iqr / 1.34);
  return 0.9 * spread * std::pow(n, -0.2);
}

}  // namespace ganssl
