#include "ganssl/gan_ssl.hpp"

#include <algorithm>
#include <cmath>

#include "ganssl/divergence.hpp"

namespace ganssl {

namespace {

void require_finite(std::span<const double> logits) {
  for (double l : logits) {
    if (!std::isfinite(l)) throw NumericError("non-finite logit");
  }
}

double logsumexp(std::span<const double> v) {
  double m = v[0];
  for (double x : v) m = std::max(m, x);
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

DiscriminatorHead DiscriminatorHead::zeros(int classes, int feature_dim) {
  if (classes < 1 || feature_dim < 1) {
    throw ShapeError("head: classes and feature_dim must be positive");
  }
  DiscriminatorHead h;
  h.class_count = classes;
  h.omega.resize(static_cast<std::size_t>(classes),
                 static_cast<std::size_t>(feature_dim));
  return h;
}

DiscriminatorHead DiscriminatorHead::glorot(int classes, int feature_dim, Rng& rng) {
  DiscriminatorHead h = zeros(classes, feature_dim);
  const double limit = std::sqrt(6.0 / (classes + feature_dim));
  for (double& w : h.omega.data) w = rng.uniform(-limit, limit);
  return h;
}

void LogitField::validate() const {
  grid.validate();
  if (class_count < 1) throw ShapeError("logit field: class_count must be >= 1");
  if (logits.rows != grid.cell_count() ||
      logits.cols != static_cast<std::size_t>(class_count)) {
    throw ShapeError("logit field: shape does not match grid/classes");
  }
  for (double l : logits.data) {
    if (!std::isfinite(l)) throw NumericError("logit field: non-finite logit");
  }
}

std::vector<double> class_probs(std::span<const double> logits) {
  require_finite(logits);
  const std::size_t k = logits.size();
  double m = 0.0;  // the pinned K+1-th logit
  for (double l : logits) m = std::max(m, l);
  std::vector<double> out(k + 1);
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = std::exp(logits[i] - m);
    s += out[i];
  }
  out[k] = std::exp(-m);
  s += out[k];
  for (double& v : out) v /= s;
  return out;
}

std::vector<double> conditional_class_probs(std::span<const double> logits) {
  require_finite(logits);
  double m = logits[0];
  for (double l : logits) m = std::max(m, l);
  std::vector<double> out(logits.size());
  double s = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    s += out[i];
  }
  for (double& v : out) v /= s;
  return out;
}

double log_prob_generated(std::span<const double> logits) {
  require_finite(logits);
  const double lse = logsumexp(logits);
  // -log(1 + exp(lse))
  return lse > 0.0 ? -lse - std::log1p(std::exp(-lse))
                   : -std::log1p(std::exp(lse));
}

double log_prob_true(std::span<const double> logits) {
  const double lse = logsumexp(logits);
  return lse + log_prob_generated(logits);
}

std::vector<double> Discriminator::features_at(std::array<double, 2> x) const {
  const int in_dim = features.input_dim();
  Matrix input(1, static_cast<std::size_t>(in_dim));
  for (int i = 0; i < in_dim; ++i) {
    input.at(0, static_cast<std::size_t>(i)) = x[static_cast<std::size_t>(i)];
  }
  MlpWorkspace ws;
  const Matrix& f = ws.forward(features, input);
  return {f.data.begin(), f.data.end()};
}

std::vector<double> Discriminator::logits(std::array<double, 2> x) const {
  const auto f = features_at(x);
  std::vector<double> out(static_cast<std::size_t>(head.class_count));
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double* wk = head.omega.row(k);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += wk[i] * f[i];
    out[k] = acc;
  }
  return out;
}

int Discriminator::predict_class(std::array<double, 2> x) const {
  const auto l = logits(x);
  std::size_t best = 0;
  for (std::size_t k = 1; k < l.size(); ++k) {
    if (l[k] > l[best]) best = k;  // strict: ties keep the lowest index
  }
  return static_cast<int>(best) + 1;
}

double supervised_objective(const Discriminator& d, const LabeledDataset& batch) {
  if (batch.size() == 0) throw DataError("supervised objective: empty batch");
  double s = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch.labels[i] == kUnlabeled) {
      throw DataError("supervised objective: unlabeled point in labeled batch");
    }
    const auto l = d.logits(batch.points[i]);
    const auto probs = conditional_class_probs(l);
    s += std::log(std::max(probs[static_cast<std::size_t>(batch.labels[i] - 1)],
                           kDensityFloor));
  }
  return s / static_cast<double>(batch.size());
}

double unsupervised_objective(const Discriminator& d,
                              std::span<const std::array<double, 2>> real_batch,
                              std::span<const std::array<double, 2>> gen_batch) {
  if (real_batch.empty() || gen_batch.empty()) {
    throw DataError("unsupervised objective: both batches must be non-empty");
  }
  double s_real = 0.0;
  for (const auto& x : real_batch) s_real += log_prob_true(d.logits(x));
  double s_gen = 0.0;
  for (const auto& x : gen_batch) s_gen += log_prob_generated(d.logits(x));
  return s_real / static_cast<double>(real_batch.size()) +
         s_gen / static_cast<double>(gen_batch.size());
}

GridDensity optimal_true_prob(const GridDensity& p, const GridDensity& p_g) {
  require_same_grid(p, p_g, "optimal_true_prob");
  GridDensity out;
  out.grid = p.grid;
  out.values.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double denom = p[i] + p_g[i];
    out.values[i] = denom > 0.0 ? p[i] / denom : 0.5;
  }
  return out;
}

LogitField lemma1_lift(const LogitField& field, const GridDensity& p,
                       const GridDensity& p_g) {
  field.validate();
  require_same_grid(p, p_g, "lemma1_lift");
  if (!(field.grid == p.grid)) {
    throw ShapeError("lemma1_lift: logit grid does not match density grid");
  }
  LogitField out = field;
  const std::size_t k = static_cast<std::size_t>(field.class_count);
  for (std::size_t c = 0; c < field.grid.cell_count(); ++c) {
    if (p_g[c] < kDensityFloor) {
      throw DataError("lemma1_lift: p_G below floor at cell " + std::to_string(c));
    }
    const double* row = field.logits.row(c);
    const double lse = logsumexp({row, k});
    const double shift = -lse + std::log(std::max(p[c], kDensityFloor) / p_g[c]);
    double* dst = out.logits.row(c);
    for (std::size_t y = 0; y < k; ++y) dst[y] = row[y] + shift;
  }
  return out;
}

double quadrature_unsupervised(const LogitField& field, const GridDensity& p,
                               const GridDensity& p_g) {
  field.validate();
  require_same_grid(p, p_g, "quadrature_unsupervised");
  if (!(field.grid == p.grid)) {
    throw ShapeError("quadrature_unsupervised: grids do not match");
  }
  const std::size_t k = static_cast<std::size_t>(field.class_count);
  const double dx = p.grid.cell_measure();
  double s = 0.0;
  for (std::size_t c = 0; c < field.grid.cell_count(); ++c) {
    const double* row = field.logits.row(c);
    s += p[c] * log_prob_true({row, k}) + p_g[c] * log_prob_generated({row, k});
  }
  return s * dx;
}

double generator_objective_divergence(const GridDensity& p, const GridDensity& p_g,
                                      double eps) {
  return -perturbed_kl(p, p_g, eps) + 2.0 * js(p, p_g) - kTwoLog2;
}

GeneratorObjectiveParts generator_objective_integral(const GridDensity& p,
                                                     const GridDensity& p_g,
                                                     double eps) {
  require_same_grid(p, p_g, "generator_objective_integral");
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw NumericError("generator_objective_integral: eps must lie in [0, 1)");
  }
  const double dx = p.grid.cell_measure();
  GeneratorObjectiveParts parts;
  double l_sum = 0.0, u_sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = p[i] - eps * p_g[i];
    if (p[i] > kDensityFloor && r < kDensityFloor) {
      throw SupportViolation(i, p[i], p_g[i], eps);
    }
    l_sum -= xlog_ratio(p[i], r);
    const double denom = p[i] + p_g[i];
    u_sum += xlog_ratio(p[i], denom) + xlog_ratio(p_g[i], denom);
  }
  parts.l_dg = l_sum * dx;
  parts.u_g = u_sum * dx;
  return parts;
}

}  // namespace ganssl
