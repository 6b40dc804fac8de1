#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "ganssl/common.hpp"
#include "ganssl/distributions.hpp"
#include "ganssl/training.hpp"

namespace ganssl {

enum class StudyKind { case1d, case2d, verify };
enum class ScenarioKind { coverage_satisfied, coverage_violated };

// Everything a run needs; fully determines all artifacts together with the
// tool version. Defaults are the documented ones for each study.
struct ExperimentConfig {
  StudyKind study = StudyKind::case1d;
  std::uint64_t seed = 0;
  std::string out_dir;  // empty: $GANSSL_LAB_OUT or "runs"

  // Shared 1D grid for densities and divergences.
  double grid_lo = -2.0;
  double grid_hi = 2.0;
  std::size_t grid_cells = 400;

  // case1d: direct C(G) study.
  std::vector<double> eps{0.0, 0.1, 0.2};
  double data_mu = 0.0;
  double data_sigma = 0.4;
  std::vector<int> gen_dims{1, 100, 100, 1};
  double kde_bandwidth = 0.05;
  std::string kde_bandwidth_rule = "fixed";  // fixed | silverman
  std::size_t eval_samples = 8192;
  std::size_t steps = 5000;

  // case2d: minimax study.
  ScenarioKind scenario = ScenarioKind::coverage_satisfied;
  std::vector<std::string> uncovered{"omega12"};  // label-free when violated
  std::vector<double> disc_x{-2.0, 2.0, 0.0};
  std::vector<double> disc_y{0.0, 0.0, 2.0};
  std::vector<double> disc_r{0.5, 0.5, 0.5};
  std::vector<int> disc_class{1, 1, 2};
  std::vector<std::string> disc_label{"omega11", "omega12", "omega2"};
  int class_count = 2;
  std::vector<int> feature_dims{2, 64, 64};
  std::vector<int> gen_dims_2d{2, 64, 64, 2};
  int latent_dim = 2;
  std::size_t labeled_per_subdomain = 6;
  std::size_t unlabeled_total = 500;
  std::size_t rounds = 10000;
  int n_disc_steps = 1;
  int n_gen_steps = 1;
  bool nonsaturating = false;
  std::size_t snapshot_every = 1000;
  std::size_t snapshot_samples = 512;
  std::size_t decision_resolution = 48;
  std::size_t decision_map_cells = 120;

  // Optimization (both studies).
  std::string optimizer = "adam";  // adam | sgd
  double learning_rate = 1e-3;
  std::size_t batch = 256;

  // verify study.
  std::size_t verify_pairs = 50;
  std::size_t verify_logit_fields = 100;

  OptimizerKind optimizer_kind() const;
  GridSpec grid() const { return GridSpec::line(grid_lo, grid_hi, grid_cells); }
  ManifoldSpec manifold() const;
  std::filesystem::path resolved_out_dir() const;

  void validate() const;
};

// TOML-subset value: string, bool, integer, float, or homogeneous array.
using TomlValue = std::variant<std::string, bool, std::int64_t, double,
                               std::vector<std::int64_t>, std::vector<double>,
                               std::vector<std::string>>;

// Fail-closed parser for the flat TOML subset used by the lab: comments,
// `key = value`, strings, booleans, integers, floats, arrays. A `[study]`
// section header is accepted; its keys are treated as top level. Unknown
// keys are errors.
std::map<std::string, TomlValue> parse_toml_subset(const std::string& text);

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical echo; parse(echo_config(c)) reproduces c exactly.
std::string echo_config(const ExperimentConfig& config);

// FNV-1a hash of the canonical echo, as fixed-width hex.
std::string config_digest(const ExperimentConfig& config);

std::string to_string(StudyKind kind);
std::string to_string(ScenarioKind kind);

}  // namespace ganssl
