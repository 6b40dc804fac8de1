#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ganssl/autodiff.hpp"
#include "ganssl/gan_ssl.hpp"
#include "ganssl/kde_objective.hpp"

namespace ganssl {

enum class OptimizerKind { sgd, adam };

// Flat-vector optimizer; Adam uses beta1=0.9, beta2=0.999, eps=1e-8.
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_adam = 1e-8;
  std::vector<double> m, v;
  long step = 0;

  void reset(std::size_t n);
  // One descent step: params -= update(grads).
  void apply(std::span<double> params, std::span<const double> grads);
};

struct GeneratedSnapshot {
  std::size_t step = 0;
  std::vector<std::array<double, 2>> samples;
};

struct TrainReport {
  std::vector<double> objective;            // per step
  std::vector<double> metric;               // TV(p, p_G) (1D) or batch accuracy (2D)
  std::vector<std::size_t> violations;      // clamped-support cells per step (1D)
  std::size_t violating_steps = 0;
  double final_metric = 0.0;                // final TV (1D); unused for 2D
  GridDensity final_density;                // 1D only
  MlpParams generator;
  std::optional<Discriminator> discriminator;  // 2D only
  std::vector<GeneratedSnapshot> snapshots;    // 2D only
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;  // never serialized; artifacts stay deterministic
};

struct TrainingFailure : NumericError {
  TrainingFailure(const std::string& what, TrainReport partial_report)
      : NumericError(what), partial(std::move(partial_report)) {}
  TrainReport partial;
};

// Direct minimization of C(G) on a 1D grid: sample latents, push through the
// generator, smooth with a KDE, evaluate the divergence form, backpropagate
// into the generator.
struct DirectTrainConfig {
  GridSpec grid = GridSpec::line(-2.0, 2.0, 400);
  double data_mu = 0.0;
  double data_sigma = 0.4;
  std::vector<int> gen_dims{1, 100, 100, 1};
  double eps = 0.0;
  double bandwidth = 0.05;
  std::size_t batch = 256;
  std::size_t steps = 5000;
  OptimizerKind optimizer = OptimizerKind::adam;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  std::size_t eval_samples = 8192;  // final-density KDE sample count
};

TrainReport train_generator_direct(const DirectTrainConfig& config);

// Alternating minimax training of J = L_D + U_GD on 2D manifold data.
struct MinimaxTrainConfig {
  ManifoldSpec manifold;
  LabeledDataset labeled;
  LabeledDataset unlabeled;  // labels all kUnlabeled; true_class kept for metrics
  std::vector<int> feature_dims{2, 64, 64};
  std::vector<int> gen_dims{2, 64, 64, 2};
  int latent_dim = 2;
  std::size_t batch = 256;
  std::size_t generated_per_round = 256;  // 0 reduces the run to supervised L_D
  std::size_t rounds = 10000;
  int n_disc_steps = 1;
  int n_gen_steps = 1;
  OptimizerKind optimizer = OptimizerKind::adam;
  double learning_rate = 1e-3;
  bool nonsaturating = false;  // off-spec stability variant, config-gated
  std::uint64_t seed = 0;
  std::size_t snapshot_every = 1000;
  std::size_t snapshot_samples = 512;
};

TrainReport train_gan_ssl_minimax(const MinimaxTrainConfig& config);

// Value-and-gradient evaluators shared by the trainer and by grad_check.
struct DiscriminatorBatch {
  Matrix labeled_x;           // nl x in_dim
  std::vector<int> labels;    // 1..K
  Matrix real_x;              // nr x in_dim (may be empty)
  Matrix generated_x;         // ng x in_dim (may be empty)
};

struct MinimaxParts {
  double l_d = 0.0;
  double u_d = 0.0;
  double j_d() const { return l_d + u_d; }
};

// J_D and its gradient with respect to [features, head] (flattened in that
// order). Also reports the real-batch class predictions for cheap metrics.
MinimaxParts eval_discriminator_objective(const MlpParams& features,
                                          const DiscriminatorHead& head,
                                          const DiscriminatorBatch& batch,
                                          std::vector<double>* grad_out,
                                          std::vector<int>* real_predictions = nullptr);

// Generator loss E log P(K+1|G(z)) (or the non-saturating variant) and its
// gradient with respect to the generator parameters.
double eval_generator_objective(const MlpParams& generator,
                                const MlpParams& features,
                                const DiscriminatorHead& head,
                                const Matrix& latents, bool nonsaturating,
                                std::vector<double>* grad_out);

// Flattening helpers for the discriminator pair (features then head).
std::vector<double> flatten_discriminator(const MlpParams& features,
                                          const DiscriminatorHead& head);
void unflatten_discriminator(std::span<const double> flat, MlpParams& features,
                             DiscriminatorHead& head);

// DiffObjective adapters (used by grad_check in tests and acceptance).
DiffObjective discriminator_objective_fn(MlpParams features, DiscriminatorHead head,
                                         DiscriminatorBatch batch);
DiffObjective generator_objective_fn(MlpParams generator, MlpParams features,
                                     DiscriminatorHead head, Matrix latents,
                                     bool nonsaturating);
// C(G)-through-KDE objective over generator parameters with fixed latents.
DiffObjective direct_objective_fn(MlpParams generator, KdeObjective objective,
                                  std::vector<double> latents);

}  // namespace ganssl
