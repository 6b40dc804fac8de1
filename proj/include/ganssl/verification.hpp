#pragma once

#include <string>
#include <vector>

#include "ganssl/gan_ssl.hpp"
#include "ganssl/training.hpp"

namespace ganssl {

struct PropositionReport {
  std::string id;
  bool pass = false;
  bool applicable = true;  // false: preconditions failed, reported not judged
  double residual = 0.0;
  double tolerance = 0.0;
  std::string oracle;
  std::string inputs_digest;
  std::string note;
};

// Applies the logit lift and checks, against direct quadrature, that
// conditional class probabilities are preserved and U never decreases.
PropositionReport verify_lemma1(const LogitField& logits, const GridDensity& p,
                                const GridDensity& p_g);

// Golden-section maximization of p log(1-t) + p_G log(t) per cell versus the
// closed form p_G/(p+p_G). `corrupt_closed_form` is a test fixture that
// perturbs the formula under test to prove the oracle can fail it.
PropositionReport verify_prop1_closed_form(const GridDensity& p,
                                           const GridDensity& p_g,
                                           bool corrupt_closed_form = false);

// U attained by the lifted optimum versus U of the closed-form optimum.
PropositionReport verify_prop1_u_equivalence(const LogitField& logits,
                                             const GridDensity& p,
                                             const GridDensity& p_g);

// |(L_DG + U_G) - (-KL(p||p-eps p_G) + 2JS(p||p_G) - 2log2)|.
PropositionReport verify_prop2_decomposition(const GridDensity& p,
                                             const GridDensity& p_g, double eps);

struct SubdomainCoverage {
  std::string label;
  int class_index = 0;
  std::size_t labeled_count = 0;
};

struct CoverageReport {
  std::vector<SubdomainCoverage> subdomains;
  bool satisfied = false;  // every subdomain holds >= 1 labeled point
};

// Assumption check: each subdomain contains at least one labeled point of
// its own class. A labeled point of a different class inside a disc is a
// data-consistency error.
CoverageReport check_assumption_coverage(const LabeledDataset& labeled,
                                         const ManifoldSpec& manifold);

struct SubdomainAccuracy {
  std::string label;
  int class_index = 0;
  std::size_t test_points = 0;
  double accuracy = 0.0;
};

// Dense uniform test points inside each disc; predicted class is the argmax
// over the K conditional logits, ties resolved to the lowest class index.
std::vector<SubdomainAccuracy> evaluate_decision(const Discriminator& d,
                                                 const ManifoldSpec& manifold,
                                                 std::size_t resolution);

struct Assumption4Probe {
  std::vector<double> residuals;  // per sampled (x_k, x_j) pair
  std::size_t generated_outside = 0;
  std::size_t generated_total = 0;
};

// Diagnostic only: for sampled pairs of manifold/labeled points, how closely
// some generated point outside the manifold interpolates their features.
Assumption4Probe probe_assumption4(const Discriminator& d,
                                   std::span<const std::array<double, 2>> generated,
                                   const ManifoldSpec& manifold,
                                   const LabeledDataset& labeled,
                                   std::size_t pair_samples, std::uint64_t seed);

// Seeded random inputs shared by the verification suite and tests.
GridDensity random_density(Rng& rng, const GridSpec& grid);
// Pair with p - max_eps * q above the floor everywhere (rejection sampled).
std::pair<GridDensity, GridDensity> random_density_pair(Rng& rng,
                                                        const GridSpec& grid,
                                                        double max_eps);
LogitField random_logit_field(Rng& rng, const GridSpec& grid, int classes,
                              double scale);

}  // namespace ganssl
