#pragma once

#include <array>
#include <span>
#include <vector>

#include "ganssl/distributions.hpp"
#include "ganssl/grid.hpp"
#include "ganssl/matrix.hpp"
#include "ganssl/mlp.hpp"

namespace ganssl {

// Per-class weight vectors omega_1..omega_K over a feature map of dimension
// feature_dim. The (K+1)-th class weight is structurally zero and never
// stored, so the "generated" logit is pinned at 0.
struct DiscriminatorHead {
  int class_count = 0;
  Matrix omega;  // K x feature_dim

  static DiscriminatorHead zeros(int classes, int feature_dim);
  static DiscriminatorHead glorot(int classes, int feature_dim, Rng& rng);
};

// K logits per location (grid cell or point); the implicit K+1-th logit is 0.
struct LogitField {
  GridSpec grid;
  int class_count = 0;
  Matrix logits;  // cell_count x K

  void validate() const;
};

// Softmax over [l_1..l_K, 0]; K+1 probabilities, max-shift stabilized.
std::vector<double> class_probs(std::span<const double> logits);

// Softmax over the K true-class logits only: P(y | x, y <= K).
std::vector<double> conditional_class_probs(std::span<const double> logits);

// log P(K+1 | x) and log P(y<=K | x), stable for large |logits|.
double log_prob_generated(std::span<const double> logits);
double log_prob_true(std::span<const double> logits);

// Discriminator = (feature map f, head omega). Logits are omega * f(x).
struct Discriminator {
  MlpParams features;
  DiscriminatorHead head;

  std::vector<double> features_at(std::array<double, 2> x) const;  // f(x)
  std::vector<double> logits(std::array<double, 2> x) const;
  int predict_class(std::array<double, 2> x) const;  // argmax, ties -> lowest
};

// L_D: mean over labeled batch of log P(y | x, y <= K). Throws on an
// unlabeled point.
double supervised_objective(const Discriminator& d, const LabeledDataset& batch);

// U: mean log P(y<=K|x) over the real batch plus mean log P(K+1|x) over the
// generated batch.
double unsupervised_objective(const Discriminator& d,
                              std::span<const std::array<double, 2>> real_batch,
                              std::span<const std::array<double, 2>> gen_batch);

// P(y<=K | x) of the optimal discriminator: p / (p + p_G) per cell.
GridDensity optimal_true_prob(const GridDensity& p, const GridDensity& p_g);

// Logit lift l*_k = l_k - logsumexp(l) + log(p/p_G). Preserves conditional
// class probabilities and drives P(K+1|x) to p_G/(p+p_G).
LogitField lemma1_lift(const LogitField& logits, const GridDensity& p,
                       const GridDensity& p_g);

// Grid quadrature of U for per-cell logits against densities p, p_G.
double quadrature_unsupervised(const LogitField& logits, const GridDensity& p,
                               const GridDensity& p_g);

// C(G) = -KL(p || p - eps p_G) + 2 JS(p || p_G) - 2 log 2.
double generator_objective_divergence(const GridDensity& p, const GridDensity& p_g,
                                      double eps);

struct GeneratorObjectiveParts {
  double l_dg = 0.0;  // -integral p log(p / (p - eps p_G))
  double u_g = 0.0;   // integral p log(p/(p+p_G)) + p_G log(p_G/(p+p_G))
  double sum() const { return l_dg + u_g; }
};

// The two integrals of the decomposition, summed directly from their
// integrands (independent route from the divergence form).
GeneratorObjectiveParts generator_objective_integral(const GridDensity& p,
                                                     const GridDensity& p_g,
                                                     double eps);

}  // namespace ganssl
