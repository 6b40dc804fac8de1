#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ganssl/grid.hpp"
#include "ganssl/rng.hpp"

namespace ganssl {

double gaussian_pdf(double mu, double sigma, double x);

std::vector<double> sample_gaussian(Rng& rng, double mu, double sigma,
                                    std::size_t n);

// One labeled disc Omega^{kl}: class k, connected-subdomain label l.
struct Disc {
  std::array<double, 2> center{0.0, 0.0};
  double radius = 0.0;
  int class_index = 1;  // 1..K
  std::string label;

  bool contains(double x, double y) const {
    const double dx = x - center[0];
    const double dy = y - center[1];
    return dx * dx + dy * dy <= radius * radius;
  }
};

// Union of disjoint labeled discs; disjointness is validated at construction.
struct ManifoldSpec {
  std::vector<Disc> discs;
  int class_count = 0;

  static ManifoldSpec create(std::vector<Disc> discs, int class_count);

  // Index of the disc containing (x, y), if any.
  std::optional<std::size_t> locate(double x, double y) const;

  // Uniform over the union, area-weighted across discs.
  std::array<double, 2> sample_uniform(Rng& rng) const;

  std::array<double, 4> bounding_box(double margin) const;  // x0,x1,y0,y1
};

std::vector<std::array<double, 2>> sample_disc_uniform(Rng& rng,
                                                       std::array<double, 2> center,
                                                       double radius,
                                                       std::size_t n);

inline constexpr int kUnlabeled = 0;

enum class Origin { labeled, unlabeled, generated };

// Points with class labels in 1..K or kUnlabeled. true_class records the
// generating disc's class for synthetic data; evaluation-only.
struct LabeledDataset {
  std::vector<std::array<double, 2>> points;
  std::vector<int> labels;
  std::vector<Origin> origins;
  std::vector<int> true_class;

  std::size_t size() const { return points.size(); }
  void push(std::array<double, 2> p, int label, Origin origin, int truth);
  void validate(int class_count) const;
};

// Gaussian-kernel KDE evaluated at grid midpoints then renormalized.
// 1D: samples are scalars.
GridDensity kde_on_grid(std::span<const double> samples, double bandwidth,
                        const GridSpec& grid);
GridDensity kde_on_grid_2d(std::span<const std::array<double, 2>> samples,
                           double bandwidth, const GridSpec& grid);

// Silverman's rule-of-thumb bandwidth for 1D samples.
double silverman_bandwidth(std::span<const double> samples);

}  // namespace ganssl
