#include "ganssl/training.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "ganssl/divergence.hpp"

namespace ganssl {

namespace {

double stable_lse_k(const double* row, std::size_t k) {
  double m = row[0];
  for (std::size_t i = 1; i < k; ++i) m = std::max(m, row[i]);
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += std::exp(row[i] - m);
  return m + std::log(s);
}

// log(1 + e^x) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

Matrix head_logits(const Matrix& feats, const DiscriminatorHead& head) {
  Matrix logits(feats.rows, head.omega.rows);
  for (std::size_t n = 0; n < feats.rows; ++n) {
    const double* fn = feats.row(n);
    double* ln = logits.row(n);
    for (std::size_t k = 0; k < head.omega.rows; ++k) {
      const double* wk = head.omega.row(k);
      double acc = 0.0;
      for (std::size_t i = 0; i < head.omega.cols; ++i) acc += wk[i] * fn[i];
      ln[k] = acc;
    }
  }
  return logits;
}

// dLoss/dF = dLoss/dLogits * omega ; dOmega += dLogits^T * F.
void head_backward(const Matrix& feats, const DiscriminatorHead& head,
                   const Matrix& d_logits, Matrix* d_feats, Matrix* d_omega) {
  if (d_feats) {
    d_feats->resize(feats.rows, head.omega.cols);
    for (std::size_t n = 0; n < feats.rows; ++n) {
      const double* dn = d_logits.row(n);
      double* out = d_feats->row(n);
      for (std::size_t k = 0; k < head.omega.rows; ++k) {
        const double d = dn[k];
        if (d == 0.0) continue;
        const double* wk = head.omega.row(k);
        for (std::size_t i = 0; i < head.omega.cols; ++i) out[i] += d * wk[i];
      }
    }
  }
  if (d_omega) {
    for (std::size_t n = 0; n < feats.rows; ++n) {
      const double* dn = d_logits.row(n);
      const double* fn = feats.row(n);
      for (std::size_t k = 0; k < head.omega.rows; ++k) {
        const double d = dn[k];
        if (d == 0.0) continue;
        double* wk = d_omega->row(k);
        for (std::size_t i = 0; i < head.omega.cols; ++i) wk[i] += d * fn[i];
      }
    }
  }
}

}  // namespace

void OptimizerState::reset(std::size_t n) {
  if (!(learning_rate > 0.0)) {
    throw NumericError("optimizer: learning rate must be positive");
  }
  step = 0;
  if (kind == OptimizerKind::adam) {
    m.assign(n, 0.0);
    v.assign(n, 0.0);
  } else {
    m.clear();
    v.clear();
  }
}

void OptimizerState::apply(std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size()) {
    throw ShapeError("optimizer: parameter/gradient size mismatch");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw NumericError("optimizer: non-finite gradient at index " +
                         std::to_string(i));
    }
  }
  if (kind == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i] -= learning_rate * grads[i];
    }
    ++step;
    return;
  }
  if (m.size() != params.size()) reset(params.size());
  ++step;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    params[i] -= learning_rate * mhat / (std::sqrt(vhat) + eps_adam);
  }
}

std::vector<double> flatten_discriminator(const MlpParams& features,
                                          const DiscriminatorHead& head) {
  std::vector<double> flat = features.flatten();
  flat.insert(flat.end(), head.omega.data.begin(), head.omega.data.end());
  return flat;
}

void unflatten_discriminator(std::span<const double> flat, MlpParams& features,
                             DiscriminatorHead& head) {
  const std::size_t nf = features.parameter_count();
  if (flat.size() != nf + head.omega.data.size()) {
    throw ShapeError("unflatten_discriminator: size mismatch");
  }
  features.unflatten(flat.subspan(0, nf));
  std::copy(flat.begin() + static_cast<std::ptrdiff_t>(nf), flat.end(),
            head.omega.data.begin());
}

MinimaxParts eval_discriminator_objective(const MlpParams& features,
                                          const DiscriminatorHead& head,
                                          const DiscriminatorBatch& batch,
                                          std::vector<double>* grad_out,
                                          std::vector<int>* real_predictions) {
  const std::size_t nl = batch.labeled_x.rows;
  const std::size_t nr = batch.real_x.rows;
  const std::size_t ng = batch.generated_x.rows;
  if (nl == 0) throw DataError("discriminator objective: empty labeled batch");
  if (batch.labels.size() != nl) {
    throw ShapeError("discriminator objective: labels do not match batch");
  }
  const std::size_t k = head.omega.rows;

  Matrix x(nl + nr + ng, batch.labeled_x.cols);
  std::copy(batch.labeled_x.data.begin(), batch.labeled_x.data.end(), x.data.begin());
  std::copy(batch.real_x.data.begin(), batch.real_x.data.end(),
            x.data.begin() + static_cast<std::ptrdiff_t>(nl * x.cols));
  std::copy(batch.generated_x.data.begin(), batch.generated_x.data.end(),
            x.data.begin() + static_cast<std::ptrdiff_t>((nl + nr) * x.cols));

  MlpWorkspace ws;
  const Matrix& feats = ws.forward(features, x);
  const Matrix logits = head_logits(feats, head);

  MinimaxParts parts;
  Matrix d_logits(grad_out ? logits.rows : 0, grad_out ? logits.cols : 0);
  std::vector<double> sigma(k);
  for (std::size_t n = 0; n < nl + nr + ng; ++n) {
    const double* ln = logits.row(n);
    const double lse = stable_lse_k(ln, k);
    for (std::size_t i = 0; i < k; ++i) sigma[i] = std::exp(ln[i] - lse);
    const double a = softplus(lse);          // log(1 + sum exp(l))
    const double p_true = std::exp(lse - a);  // P(y<=K | x)
    if (n < nl) {
      const int y = batch.labels[n];
      if (y < 1 || y > static_cast<int>(k)) {
        throw DataError("discriminator objective: label outside 1..K");
      }
      parts.l_d += (ln[y - 1] - lse) / static_cast<double>(nl);
      if (grad_out) {
        double* dn = d_logits.row(n);
        for (std::size_t i = 0; i < k; ++i) {
          const double dj = ((i + 1 == static_cast<std::size_t>(y) ? 1.0 : 0.0) -
                             sigma[i]) /
                            static_cast<double>(nl);
          dn[i] = -dj;  // loss = -J_D
        }
      }
    } else if (n < nl + nr) {
      parts.u_d += (lse - a) / static_cast<double>(nr);
      if (real_predictions) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < k; ++i) {
          if (ln[i] > ln[best]) best = i;
        }
        real_predictions->push_back(static_cast<int>(best) + 1);
      }
      if (grad_out) {
        double* dn = d_logits.row(n);
        for (std::size_t i = 0; i < k; ++i) {
          dn[i] = -(sigma[i] * (1.0 - p_true)) / static_cast<double>(nr);
        }
      }
    } else {
      parts.u_d += -a / static_cast<double>(ng);
      if (grad_out) {
        double* dn = d_logits.row(n);
        for (std::size_t i = 0; i < k; ++i) {
          dn[i] = (sigma[i] * p_true) / static_cast<double>(ng);
        }
      }
    }
  }

  if (grad_out) {
    Matrix d_feats;
    Matrix d_omega(head.omega.rows, head.omega.cols);
    head_backward(feats, head, d_logits, &d_feats, &d_omega);
    MlpGrads fg(features);
    ws.backward(features, d_feats, fg);
    *grad_out = fg.flatten();
    grad_out->insert(grad_out->end(), d_omega.data.begin(), d_omega.data.end());
  }
  return parts;
}

double eval_generator_objective(const MlpParams& generator,
                                const MlpParams& features,
                                const DiscriminatorHead& head,
                                const Matrix& latents, bool nonsaturating,
                                std::vector<double>* grad_out) {
  const std::size_t ng = latents.rows;
  if (ng == 0) throw DataError("generator objective: empty latent batch");
  const std::size_t k = head.omega.rows;

  MlpWorkspace gen_ws, feat_ws;
  const Matrix& samples = gen_ws.forward(generator, latents);
  const Matrix& feats = feat_ws.forward(features, samples);
  const Matrix logits = head_logits(feats, head);

  double loss = 0.0;
  Matrix d_logits(grad_out ? ng : 0, grad_out ? k : 0);
  std::vector<double> sigma(k);
  for (std::size_t n = 0; n < ng; ++n) {
    const double* ln = logits.row(n);
    const double lse = stable_lse_k(ln, k);
    const double a = softplus(lse);
    const double p_true = std::exp(lse - a);
    // Spec form: minimize E log P(K+1|G(z)); the non-saturating variant
    // minimizes -E log P(y<=K|G(z)) instead.
    loss += (nonsaturating ? -(lse - a) : -a) / static_cast<double>(ng);
    if (grad_out) {
      for (std::size_t i = 0; i < k; ++i) sigma[i] = std::exp(ln[i] - lse);
      double* dn = d_logits.row(n);
      for (std::size_t i = 0; i < k; ++i) {
        const double pi = sigma[i] * p_true;
        dn[i] = (nonsaturating ? -(sigma[i] - pi) : -pi) / static_cast<double>(ng);
      }
    }
  }
  if (grad_out) {
    Matrix d_feats;
    head_backward(feats, head, d_logits, &d_feats, nullptr);
    MlpGrads feat_scratch(features);
    Matrix d_samples;
    feat_ws.backward(features, d_feats, feat_scratch, &d_samples);
    MlpGrads gg(generator);
    gen_ws.backward(generator, d_samples, gg);
    *grad_out = gg.flatten();
  }
  return loss;
}

DiffObjective discriminator_objective_fn(MlpParams features, DiscriminatorHead head,
                                         DiscriminatorBatch batch) {
  auto shared_f = std::make_shared<MlpParams>(std::move(features));
  auto shared_h = std::make_shared<DiscriminatorHead>(std::move(head));
  auto shared_b = std::make_shared<DiscriminatorBatch>(std::move(batch));
  DiffObjective obj;
  obj.value = [=](std::span<const double> at) {
    MlpParams f = *shared_f;
    DiscriminatorHead h = *shared_h;
    unflatten_discriminator(at, f, h);
    return eval_discriminator_objective(f, h, *shared_b, nullptr).j_d();
  };
  obj.gradient = [=](std::span<const double> at) {
    MlpParams f = *shared_f;
    DiscriminatorHead h = *shared_h;
    unflatten_discriminator(at, f, h);
    std::vector<double> g;
    eval_discriminator_objective(f, h, *shared_b, &g);
    for (double& v : g) v = -v;  // internal grads are for -J_D
    return g;
  };
  return obj;
}

DiffObjective generator_objective_fn(MlpParams generator, MlpParams features,
                                     DiscriminatorHead head, Matrix latents,
                                     bool nonsaturating) {
  auto shared_g = std::make_shared<MlpParams>(std::move(generator));
  auto shared_f = std::make_shared<MlpParams>(std::move(features));
  auto shared_h = std::make_shared<DiscriminatorHead>(std::move(head));
  auto shared_z = std::make_shared<Matrix>(std::move(latents));
  DiffObjective obj;
  obj.value = [=](std::span<const double> at) {
    MlpParams g = *shared_g;
    g.unflatten(at);
    return eval_generator_objective(g, *shared_f, *shared_h, *shared_z,
                                    nonsaturating, nullptr);
  };
  obj.gradient = [=](std::span<const double> at) {
    MlpParams g = *shared_g;
    g.unflatten(at);
    std::vector<double> grad;
    eval_generator_objective(g, *shared_f, *shared_h, *shared_z, nonsaturating,
                             &grad);
    return grad;
  };
  return obj;
}

DiffObjective direct_objective_fn(MlpParams generator, KdeObjective objective,
                                  std::vector<double> latents) {
  auto shared_g = std::make_shared<MlpParams>(std::move(generator));
  auto shared_o = std::make_shared<KdeObjective>(std::move(objective));
  auto shared_z = std::make_shared<std::vector<double>>(std::move(latents));
  auto forward = [=](std::span<const double> at, std::vector<double>* grad_out) {
    MlpParams g = *shared_g;
    g.unflatten(at);
    Matrix z(shared_z->size(), 1);
    std::copy(shared_z->begin(), shared_z->end(), z.data.begin());
    MlpWorkspace ws;
    const Matrix& x = ws.forward(g, z);
    const auto eval = shared_o->evaluate(x.data, grad_out != nullptr);
    if (grad_out) {
      Matrix d_x(x.rows, 1);
      std::copy(eval.sample_grad.begin(), eval.sample_grad.end(), d_x.data.begin());
      MlpGrads gg(g);
      ws.backward(g, d_x, gg);
      *grad_out = gg.flatten();
    }
    return eval.value;
  };
  DiffObjective obj;
  obj.value = [forward](std::span<const double> at) { return forward(at, nullptr); };
  obj.gradient = [forward](std::span<const double> at) {
    std::vector<double> g;
    forward(at, &g);
    return g;
  };
  return obj;
}

TrainReport train_generator_direct(const DirectTrainConfig& config) {
  if (config.grid.dims != 1) {
    throw ConfigError("direct training expects a 1D grid");
  }
  if (!(config.eps >= 0.0 && config.eps < 1.0)) {
    throw ConfigError("direct training: eps must lie in [0, 1)");
  }
  if (config.gen_dims.front() != 1 || config.gen_dims.back() != 1) {
    throw ConfigError("direct training: generator must map 1D latent to 1D sample");
  }
  const auto t0 = std::chrono::steady_clock::now();

  const GridDensity p = discretize(
      [&](double x) { return gaussian_pdf(config.data_mu, config.data_sigma, x); },
      config.grid);
  KdeObjectiveConfig oc;
  oc.target = p;
  oc.bandwidth = config.bandwidth;
  oc.eps = config.eps;
  oc.kind = GridObjectiveKind::generator_c;
  oc.clamp_support = true;
  const KdeObjective objective(oc);

  Rng root(config.seed);
  Rng r_init = root.fork(1);
  Rng r_latent = root.fork(2);
  Rng r_eval = root.fork(3);

  TrainReport report;
  report.seed = config.seed;
  report.generator = MlpParams::glorot(config.gen_dims, r_init);
  std::vector<double> flat = report.generator.flatten();
  OptimizerState opt;
  opt.kind = config.optimizer;
  opt.learning_rate = config.learning_rate;
  opt.reset(flat.size());

  MlpWorkspace ws;
  MlpGrads grads(report.generator);
  Matrix z(config.batch, 1);
  for (std::size_t step = 0; step < config.steps; ++step) {
    for (double& v : z.data) v = r_latent.normal();
    const Matrix& x = ws.forward(report.generator, z);
    const auto eval = objective.evaluate(x.data, true);
    if (!std::isfinite(eval.value)) {
      throw NumericError("direct training: objective diverged at step " +
                         std::to_string(step));
    }
    report.objective.push_back(eval.value);
    report.metric.push_back(total_variation(p, eval.density));
    report.violations.push_back(eval.clamped_cells);
    if (eval.clamped_cells > 0) ++report.violating_steps;

    Matrix d_x(x.rows, 1);
    std::copy(eval.sample_grad.begin(), eval.sample_grad.end(), d_x.data.begin());
    grads.zero();
    ws.backward(report.generator, d_x, grads);
    const auto flat_grads = grads.flatten();
    opt.apply(flat, flat_grads);
    report.generator.unflatten(flat);
  }

  // Final density from a larger evaluation sample through the trained G.
  Matrix z_eval(config.eval_samples, 1);
  for (double& v : z_eval.data) v = r_eval.normal();
  const Matrix& x_eval = ws.forward(report.generator, z_eval);
  report.final_density = kde_on_grid(x_eval.data, config.bandwidth, config.grid);
  report.final_metric = total_variation(p, report.final_density);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (2 * report.violating_steps > config.steps) {
    throw TrainingFailure("direct training: support violations on more than half "
                          "of all steps (eps too large for this run)",
                          std::move(report));
  }
  return report;
}

TrainReport train_gan_ssl_minimax(const MinimaxTrainConfig& config) {
  const int k = config.manifold.class_count;
  if (k < 2) throw ConfigError("minimax training: need at least 2 classes");
  if (config.feature_dims.front() != 2) {
    throw ConfigError("minimax training: feature net must take 2D input");
  }
  if (config.gen_dims.front() != config.latent_dim ||
      config.gen_dims.back() != 2) {
    throw ConfigError("minimax training: generator must map latent_dim to 2D");
  }
  config.labeled.validate(k);
  config.unlabeled.validate(k);
  if (config.labeled.size() == 0) {
    throw ConfigError("minimax training: need labeled data");
  }
  const auto t0 = std::chrono::steady_clock::now();

  Rng root(config.seed);
  Rng r_init_g = root.fork(1);
  Rng r_init_d = root.fork(2);
  Rng r_latent = root.fork(3);
  Rng r_batch = root.fork(4);
  Rng r_snapshot = root.fork(5);

  TrainReport report;
  report.seed = config.seed;
  report.generator = MlpParams::glorot(config.gen_dims, r_init_g);
  Discriminator disc;
  disc.features = MlpParams::glorot(config.feature_dims, r_init_d);
  disc.head = DiscriminatorHead::glorot(k, config.feature_dims.back(), r_init_d);

  std::vector<double> disc_flat = flatten_discriminator(disc.features, disc.head);
  std::vector<double> gen_flat = report.generator.flatten();
  OptimizerState opt_d, opt_g;
  opt_d.kind = opt_g.kind = config.optimizer;
  opt_d.learning_rate = opt_g.learning_rate = config.learning_rate;
  opt_d.reset(disc_flat.size());
  opt_g.reset(gen_flat.size());

  const std::size_t nl = config.labeled.size();
  DiscriminatorBatch batch;
  batch.labeled_x.resize(nl, 2);
  batch.labels.resize(nl);
  for (std::size_t i = 0; i < nl; ++i) {
    batch.labeled_x.at(i, 0) = config.labeled.points[i][0];
    batch.labeled_x.at(i, 1) = config.labeled.points[i][1];
    batch.labels[i] = config.labeled.labels[i];
  }

  const std::size_t pool = config.unlabeled.size();
  const bool full_pool = pool > 0 && config.batch >= pool;
  const std::size_t nr = pool == 0 ? 0 : std::min(config.batch, pool);
  const std::size_t ng = config.generated_per_round;
  std::vector<std::size_t> real_idx(nr);
  Matrix latents(ng, static_cast<std::size_t>(config.latent_dim));
  MlpWorkspace gen_ws;
  std::vector<double> grad;
  std::vector<int> predictions;

  for (std::size_t round = 0; round < config.rounds; ++round) {
    for (int ds = 0; ds < config.n_disc_steps; ++ds) {
      batch.real_x.resize(nr, 2);
      for (std::size_t i = 0; i < nr; ++i) {
        real_idx[i] = full_pool ? i : r_batch.index(pool);
        batch.real_x.at(i, 0) = config.unlabeled.points[real_idx[i]][0];
        batch.real_x.at(i, 1) = config.unlabeled.points[real_idx[i]][1];
      }
      if (ng > 0) {
        for (double& v : latents.data) v = r_latent.normal();
        batch.generated_x = gen_ws.forward(report.generator, latents);
      } else {
        batch.generated_x.resize(0, 2);
      }
      predictions.clear();
      const auto parts = eval_discriminator_objective(disc.features, disc.head,
                                                      batch, &grad, &predictions);
      if (!std::isfinite(parts.j_d())) {
        throw NumericError("minimax training: J_D diverged at round " +
                           std::to_string(round));
      }
      if (ds == 0) {
        report.objective.push_back(parts.j_d());
        double acc = 0.0;
        if (nr > 0) {
          for (std::size_t i = 0; i < nr; ++i) {
            if (predictions[i] == config.unlabeled.true_class[real_idx[i]]) {
              acc += 1.0;
            }
          }
          acc /= static_cast<double>(nr);
        } else {
          for (std::size_t i = 0; i < nl; ++i) {
            std::array<double, 2> pt{batch.labeled_x.at(i, 0),
                                     batch.labeled_x.at(i, 1)};
            if (disc.predict_class(pt) == batch.labels[i]) acc += 1.0;
          }
          acc /= static_cast<double>(nl);
        }
        report.metric.push_back(acc);
        report.violations.push_back(0);
      }
      opt_d.apply(disc_flat, grad);
      unflatten_discriminator(disc_flat, disc.features, disc.head);
    }

    if (ng > 0) {
      for (int gs = 0; gs < config.n_gen_steps; ++gs) {
        for (double& v : latents.data) v = r_latent.normal();
        const double gl =
            eval_generator_objective(report.generator, disc.features, disc.head,
                                     latents, config.nonsaturating, &grad);
        if (!std::isfinite(gl)) {
          throw NumericError("minimax training: generator loss diverged at round " +
                             std::to_string(round));
        }
        opt_g.apply(gen_flat, grad);
        report.generator.unflatten(gen_flat);
      }
    }

    if (config.snapshot_every > 0 && (round + 1) % config.snapshot_every == 0) {
      GeneratedSnapshot snap;
      snap.step = round + 1;
      Matrix zs(config.snapshot_samples, static_cast<std::size_t>(config.latent_dim));
      for (double& v : zs.data) v = r_snapshot.normal();
      const Matrix& xs = gen_ws.forward(report.generator, zs);
      snap.samples.resize(xs.rows);
      for (std::size_t i = 0; i < xs.rows; ++i) {
        snap.samples[i] = {xs.at(i, 0), xs.at(i, 1)};
      }
      report.snapshots.push_back(std::move(snap));
    }
  }

  report.discriminator = std::move(disc);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

}  // namespace ganssl
