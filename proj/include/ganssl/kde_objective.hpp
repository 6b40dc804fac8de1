#pragma once

#include <span>

#include "ganssl/autodiff.hpp"
#include "ganssl/divergence.hpp"
#include "ganssl/grid.hpp"

namespace ganssl {

enum class GridObjectiveKind {
  kl_divergence,   // KL(p || kde)
  js_divergence,   // JS(p || kde)
  perturbed_kl,    // KL(p || p - eps*kde)
  generator_c,     // -KL(p || p - eps*kde) + 2 JS(p || kde) - 2 log 2
};

struct KdeObjectiveConfig {
  GridDensity target;  // p, on the evaluation grid
  double bandwidth = 0.05;
  double eps = 0.0;
  GridObjectiveKind kind = GridObjectiveKind::generator_c;
  bool clamp_support = true;  // false: support violations throw
};

struct KdeObjectiveEval {
  double value = 0.0;
  std::vector<double> sample_grad;  // d(value)/d(sample j)
  std::size_t clamped_cells = 0;
  GridDensity density;  // normalized, floored KDE of the samples
};

// Differentiable map samples -> KDE grid density -> divergence objective.
// The gradient with respect to sample positions is computed analytically
// (kernel derivative, normalization, per-cell divergence terms), so this is
// the efficient path for training; apply() registers the whole map on a
// tape as a single fused node so objectives over generator parameters can
// be backpropagated end to end.
class KdeObjective {
 public:
  explicit KdeObjective(KdeObjectiveConfig config);

  KdeObjectiveEval evaluate(std::span<const double> samples,
                            bool with_gradient) const;

  Var apply(Tape& tape, std::span<const Var> samples) const;

  const GridDensity& target() const { return config_.target; }
  const KdeObjectiveConfig& config() const { return config_; }

 private:
  KdeObjectiveConfig config_;
};

}  // namespace ganssl
