#include "ganssl/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ganssl/divergence.hpp"

namespace ganssl {

namespace {

std::string grid_digest(const GridSpec& g) {
  std::ostringstream ss;
  ss << "grid=" << g.dims << "d[" << g.lower[0] << "," << g.upper[0] << "]x"
     << g.cells[0];
  if (g.dims == 2) {
    ss << ",[" << g.lower[1] << "," << g.upper[1] << "]x" << g.cells[1];
  }
  return ss.str();
}

// Golden-section maximizer of a unimodal function on (lo, hi).
template <typename F>
double golden_section_max(F&& f, double lo, double hi, int iterations) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

PropositionReport verify_lemma1(const LogitField& logits, const GridDensity& p,
                                const GridDensity& p_g) {
  PropositionReport report;
  report.id = "lemma1_lift";
  report.tolerance = 1e-10;
  report.oracle = "direct softmax comparison per cell and grid-quadrature U";
  report.inputs_digest = grid_digest(p.grid) + ";K=" + std::to_string(logits.class_count);

  const LogitField lifted = lemma1_lift(logits, p, p_g);
  const std::size_t k = static_cast<std::size_t>(logits.class_count);
  double cond_residual = 0.0;
  for (std::size_t c = 0; c < logits.grid.cell_count(); ++c) {
    const auto before = conditional_class_probs({logits.logits.row(c), k});
    const auto after = conditional_class_probs({lifted.logits.row(c), k});
    for (std::size_t y = 0; y < k; ++y) {
      cond_residual = std::max(cond_residual, std::abs(before[y] - after[y]));
    }
  }
  const double u_before = quadrature_unsupervised(logits, p, p_g);
  const double u_after = quadrature_unsupervised(lifted, p, p_g);
  const double delta_u = u_after - u_before;
  report.residual = std::max(cond_residual, std::max(0.0, -delta_u));
  report.pass = report.residual <= report.tolerance;
  std::ostringstream note;
  note << "delta_U=" << delta_u;
  report.note = note.str();
  return report;
}

PropositionReport verify_prop1_closed_form(const GridDensity& p,
                                           const GridDensity& p_g,
                                           bool corrupt_closed_form) {
  require_same_grid(p, p_g, "verify_prop1_closed_form");
  PropositionReport report;
  report.id = "prop1_closed_form";
  report.tolerance = 1e-6;
  report.oracle = "per-cell golden-section maximization of p log(1-t) + p_G log t";
  report.inputs_digest = grid_digest(p.grid);

  double worst = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    const double a = std::max(p[c], kDensityFloor);
    const double b = std::max(p_g[c], kDensityFloor);
    const double t_oracle = golden_section_max(
        [&](double t) { return a * std::log(1.0 - t) + b * std::log(t); }, 1e-9,
        1.0 - 1e-9, 80);
    const double t_closed =
        corrupt_closed_form ? b / (a + 2.0 * b) : b / (a + b);
    worst = std::max(worst, std::abs(t_oracle - t_closed));
  }
  report.residual = worst;
  report.pass = worst <= report.tolerance;
  if (corrupt_closed_form) report.note = "closed form deliberately corrupted";
  return report;
}

PropositionReport verify_prop1_u_equivalence(const LogitField& logits,
                                             const GridDensity& p,
                                             const GridDensity& p_g) {
  PropositionReport report;
  report.id = "prop1_u_equivalence";
  report.tolerance = 1e-8;
  report.oracle = "quadrature U of lifted logits vs U of closed-form probabilities";
  report.inputs_digest = grid_digest(p.grid);

  const LogitField lifted = lemma1_lift(logits, p, p_g);
  const double u_lift = quadrature_unsupervised(lifted, p, p_g);
  const double dx = p.grid.cell_measure();
  double u_closed = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    const double denom = p[c] + p_g[c];
    u_closed += xlog_ratio(p[c], denom) + xlog_ratio(p_g[c], denom);
  }
  u_closed *= dx;
  report.residual = std::abs(u_lift - u_closed);
  report.pass = report.residual <= report.tolerance;
  return report;
}

PropositionReport verify_prop2_decomposition(const GridDensity& p,
                                             const GridDensity& p_g, double eps) {
  PropositionReport report;
  report.id = "prop2_decomposition";
  report.tolerance = 1e-10;
  report.oracle = "direct integrand sums vs divergence-module composition";
  std::ostringstream digest;
  digest << grid_digest(p.grid) << ";eps=" << eps;
  report.inputs_digest = digest.str();
  try {
    const auto parts = generator_objective_integral(p, p_g, eps);
    const double divergence_form = generator_objective_divergence(p, p_g, eps);
    report.residual = std::abs(parts.sum() - divergence_form);
    report.pass = report.residual <= report.tolerance;
  } catch (const SupportViolation& violation) {
    report.applicable = false;
    report.pass = true;  // not judged
    report.note = std::string("support violation: ") + violation.what();
  }
  return report;
}

CoverageReport check_assumption_coverage(const LabeledDataset& labeled,
                                         const ManifoldSpec& manifold) {
  CoverageReport report;
  report.subdomains.reserve(manifold.discs.size());
  for (const Disc& d : manifold.discs) {
    report.subdomains.push_back({d.label, d.class_index, 0});
  }
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    if (labeled.labels[i] == kUnlabeled) continue;
    const auto disc = manifold.locate(labeled.points[i][0], labeled.points[i][1]);
    if (!disc) continue;
    const Disc& d = manifold.discs[*disc];
    if (d.class_index != labeled.labels[i]) {
      throw DataError("coverage: labeled point of class " +
                      std::to_string(labeled.labels[i]) + " lies inside disc '" +
                      d.label + "' of class " + std::to_string(d.class_index));
    }
    ++report.subdomains[*disc].labeled_count;
  }
  report.satisfied = true;
  for (const auto& s : report.subdomains) {
    if (s.labeled_count == 0) report.satisfied = false;
  }
  return report;
}

std::vector<SubdomainAccuracy> evaluate_decision(const Discriminator& d,
                                                 const ManifoldSpec& manifold,
                                                 std::size_t resolution) {
  if (resolution < 2) throw DataError("evaluate_decision: resolution must be >= 2");
  std::vector<SubdomainAccuracy> out;
  out.reserve(manifold.discs.size());
  for (const Disc& disc : manifold.discs) {
    SubdomainAccuracy acc{disc.label, disc.class_index, 0, 0.0};
    std::size_t correct = 0;
    for (std::size_t ix = 0; ix < resolution; ++ix) {
      for (std::size_t iy = 0; iy < resolution; ++iy) {
        const double x = disc.center[0] - disc.radius +
                         2.0 * disc.radius * (static_cast<double>(ix) + 0.5) /
                             static_cast<double>(resolution);
        const double y = disc.center[1] - disc.radius +
                         2.0 * disc.radius * (static_cast<double>(iy) + 0.5) /
                             static_cast<double>(resolution);
        if (!disc.contains(x, y)) continue;
        ++acc.test_points;
        if (d.predict_class({x, y}) == disc.class_index) ++correct;
      }
    }
    acc.accuracy = acc.test_points == 0
                       ? 0.0
                       : static_cast<double>(correct) /
                             static_cast<double>(acc.test_points);
    out.push_back(acc);
  }
  return out;
}

Assumption4Probe probe_assumption4(const Discriminator& d,
                                   std::span<const std::array<double, 2>> generated,
                                   const ManifoldSpec& manifold,
                                   const LabeledDataset& labeled,
                                   std::size_t pair_samples, std::uint64_t seed) {
  Assumption4Probe probe;
  probe.generated_total = generated.size();

  // Features of generated points strictly outside all discs.
  std::vector<std::vector<double>> gen_features;
  for (const auto& g : generated) {
    if (manifold.locate(g[0], g[1]).has_value()) continue;
    ++probe.generated_outside;
    gen_features.push_back(d.features_at(g));
  }
  if (gen_features.empty() || labeled.size() == 0) return probe;

  Rng rng(seed);
  for (std::size_t s = 0; s < pair_samples; ++s) {
    // x_k uniform on the manifold; x_j a labeled point of a different class.
    const auto xk = manifold.sample_uniform(rng);
    const int k_class =
        manifold.discs[*manifold.locate(xk[0], xk[1])].class_index;
    std::vector<std::size_t> other;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      if (labeled.labels[i] != kUnlabeled && labeled.labels[i] != k_class) {
        other.push_back(i);
      }
    }
    if (other.empty()) continue;
    const auto xj = labeled.points[other[rng.index(other.size())]];
    const auto fk = d.features_at(xk);
    const auto fj = d.features_at(xj);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> diff(fk.size());
    for (const auto& fg : gen_features) {
      // min over alpha of ||fg - alpha fk - (1-alpha) fj||, alpha in [0,1]
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < fk.size(); ++i) {
        const double dir = fk[i] - fj[i];
        num += (fg[i] - fj[i]) * dir;
        den += dir * dir;
      }
      const double alpha = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 0.5;
      double dist2 = 0.0;
      for (std::size_t i = 0; i < fk.size(); ++i) {
        const double r = fg[i] - alpha * fk[i] - (1.0 - alpha) * fj[i];
        dist2 += r * r;
      }
      best = std::min(best, std::sqrt(dist2));
    }
    probe.residuals.push_back(best);
  }
  return probe;
}

GridDensity random_density(Rng& rng, const GridSpec& grid) {
  // Mixture of 1-3 Gaussians over a uniform base; the base keeps densities
  // bounded away from zero so ratio-based checks stay well conditioned.
  const int modes = 1 + static_cast<int>(rng.index(3));
  std::vector<double> mu(static_cast<std::size_t>(modes));
  std::vector<double> sigma(static_cast<std::size_t>(modes));
  std::vector<double> weight(static_cast<std::size_t>(modes));
  const double span = grid.upper[0] - grid.lower[0];
  double wsum = 0.0;
  for (int m = 0; m < modes; ++m) {
    mu[static_cast<std::size_t>(m)] =
        rng.uniform(grid.lower[0] + 0.2 * span, grid.upper[0] - 0.2 * span);
    sigma[static_cast<std::size_t>(m)] = rng.uniform(0.25, 0.8);
    weight[static_cast<std::size_t>(m)] = rng.uniform(0.2, 1.0);
    wsum += weight[static_cast<std::size_t>(m)];
  }
  GridDensity d;
  d.grid = grid;
  d.values.resize(grid.cell_count());
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    const double x = grid.midpoint(0, i);
    double v = 0.5 / span;  // uniform base, half the mass
    for (int m = 0; m < modes; ++m) {
      const auto mi = static_cast<std::size_t>(m);
      v += 0.5 * weight[mi] / wsum * gaussian_pdf(mu[mi], sigma[mi], x);
    }
    d.values[i] = v;
  }
  d.normalize();
  return d;
}

std::pair<GridDensity, GridDensity> random_density_pair(Rng& rng,
                                                        const GridSpec& grid,
                                                        double max_eps) {
  for (int attempt = 0; attempt < 256; ++attempt) {
    GridDensity p = random_density(rng, grid);
    GridDensity q = random_density(rng, grid);
    bool ok = true;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] - max_eps * q[i] < 1e-6) {
        ok = false;
        break;
      }
    }
    if (ok) return {std::move(p), std::move(q)};
  }
  throw NumericError("random_density_pair: rejection sampling failed");
}

LogitField random_logit_field(Rng& rng, const GridSpec& grid, int classes,
                              double scale) {
  LogitField f;
  f.grid = grid;
  f.class_count = classes;
  f.logits.resize(grid.cell_count(), static_cast<std::size_t>(classes));
  for (double& l : f.logits.data) l = rng.normal(0.0, scale);
  return f;
}

}  // namespace ganssl
