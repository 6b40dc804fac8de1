#include "ganssl/kde_objective.hpp"

#include <cmath>

namespace ganssl {

KdeObjective::KdeObjective(KdeObjectiveConfig config) : config_(std::move(config)) {
  config_.target.check_invariants();
  if (config_.target.grid.dims != 1) {
    throw ShapeError("kde objective: expected a 1D target grid");
  }
  if (!(config_.bandwidth > 0.0)) {
    throw DataError("kde objective: bandwidth must be positive");
  }
  if (!(config_.eps >= 0.0 && config_.eps < 1.0)) {
    throw NumericError("kde objective: eps must lie in [0, 1)");
  }
}

KdeObjectiveEval KdeObjective::evaluate(std::span<const double> samples,
                                        bool with_gradient) const {
  if (samples.empty()) throw DataError("kde objective: need at least one sample");
  const GridDensity& p = config_.target;
  const GridSpec& grid = p.grid;
  const std::size_t cells = grid.cell_count();
  const std::size_t n = samples.size();
  const double h = config_.bandwidth;
  const double dx = grid.cell_measure();
  const double eps = config_.eps;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double kernel_norm = inv_n / (h * std::sqrt(2.0 * std::numbers::pi));

  // Raw KDE; kernel values cached for the backward pass.
  std::vector<double> raw(cells, 0.0);
  std::vector<double> kernel(with_gradient ? n * cells : 0);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = samples[j];
    if (!std::isfinite(x)) throw NumericError("kde objective: non-finite sample");
    for (std::size_t m = 0; m < cells; ++m) {
      const double z = (grid.midpoint(0, m) - x) / h;
      const double k = kernel_norm * std::exp(-0.5 * z * z);
      raw[m] += k;
      if (with_gradient) kernel[j * cells + m] = k;
    }
  }
  double mass = 0.0;
  for (double v : raw) mass += v;
  mass *= dx;
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw NumericError("kde objective: degenerate sample mass (samples far off-grid?)");
  }

  KdeObjectiveEval out;
  out.density.grid = grid;
  out.density.values.resize(cells);
  std::vector<bool> floored(cells);
  for (std::size_t m = 0; m < cells; ++m) {
    const double u = raw[m] / mass;
    floored[m] = u <= kDensityFloor;
    out.density.values[m] = floored[m] ? kDensityFloor : u;
  }

  // Objective value and d(value)/d(u_m) in one pass.
  const bool want_pkl = config_.kind == GridObjectiveKind::perturbed_kl ||
                        config_.kind == GridObjectiveKind::generator_c;
  const bool want_js = config_.kind == GridObjectiveKind::js_divergence ||
                       config_.kind == GridObjectiveKind::generator_c;
  const bool want_kl = config_.kind == GridObjectiveKind::kl_divergence;
  double kl_sum = 0.0, js_sum = 0.0, pkl_sum = 0.0;
  std::vector<double> du(with_gradient ? cells : 0, 0.0);
  for (std::size_t m = 0; m < cells; ++m) {
    const double pm = p[m];
    const double um = out.density.values[m];
    double d = 0.0;
    if (want_kl) {
      kl_sum += xlog_ratio(pm, um);
      d += pm > 0.0 ? -pm / um : 0.0;
    }
    if (want_js) {
      const double mid = 0.5 * (pm + um);
      js_sum += 0.5 * (xlog_ratio(pm, mid) + xlog_ratio(um, mid));
      const double djs = 0.5 * std::log((2.0 * um) / (pm + um));
      d += (config_.kind == GridObjectiveKind::generator_c ? 2.0 : 1.0) * djs;
    }
    if (want_pkl) {
      const double r = pm - eps * um;
      const bool violated = pm > kDensityFloor && r < kDensityFloor;
      if (violated) {
        if (!config_.clamp_support) throw SupportViolation(m, pm, um, eps);
        ++out.clamped_cells;
      }
      pkl_sum += xlog_ratio(pm, r);
      const double dpkl =
          (pm > 0.0 && r > kDensityFloor) ? pm * eps / r : 0.0;
      d += config_.kind == GridObjectiveKind::generator_c ? -dpkl : dpkl;
    }
    if (with_gradient) du[m] = floored[m] ? 0.0 : d * dx;
  }
  switch (config_.kind) {
    case GridObjectiveKind::kl_divergence:
      out.value = kl_sum * dx;
      break;
    case GridObjectiveKind::js_divergence:
      out.value = js_sum * dx;
      break;
    case GridObjectiveKind::perturbed_kl:
      out.value = pkl_sum * dx;
      break;
    case GridObjectiveKind::generator_c:
      out.value = (-pkl_sum + 2.0 * js_sum) * dx - kTwoLog2;
      break;
  }
  if (!std::isfinite(out.value)) {
    throw NumericError("kde objective: non-finite objective value");
  }
  if (!with_gradient) return out;

  // Chain through normalization: u_l = raw_l / mass.
  double weighted = 0.0;
  for (std::size_t m = 0; m < cells; ++m) weighted += du[m] * raw[m];
  std::vector<double> dv(cells);
  for (std::size_t m = 0; m < cells; ++m) {
    dv[m] = du[m] / mass - dx * weighted / (mass * mass);
  }
  // Chain through the kernel: d raw_m / d x_j = k * (mid_m - x_j) / h^2.
  out.sample_grad.assign(n, 0.0);
  const double inv_h2 = 1.0 / (h * h);
  for (std::size_t j = 0; j < n; ++j) {
    const double* kj = kernel.data() + j * cells;
    double g = 0.0;
    for (std::size_t m = 0; m < cells; ++m) {
      g += dv[m] * kj[m] * (grid.midpoint(0, m) - samples[j]) * inv_h2;
    }
    out.sample_grad[j] = g;
  }
  return out;
}

Var KdeObjective::apply(Tape& tape, std::span<const Var> samples) const {
  std::vector<double> xs(samples.size());
  std::vector<NodeId> ids(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    xs[i] = samples[i].value();
    ids[i] = samples[i].id;
  }
  const auto eval = evaluate(xs, true);
  return {&tape, tape.nary(ids, eval.value, eval.sample_grad)};
}

}  // namespace ganssl
