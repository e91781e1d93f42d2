#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "memgan/adversary.hpp"
#include "memgan/compiler.hpp"
#include "memgan/distributions.hpp"
#include "memgan/generator.hpp"
#include "memgan/partition.hpp"

namespace memgan {

// One JSON document drives every experiment; unknown keys are rejected.
struct ExperimentConfig {
  DimensionSpec dimension{32, 4, 1.0};

  int basis_count = 6;
  int frequency_cap = 8;
  double amplitude = 1.0;
  std::string image_mode = "synthetic";
  std::string image_file;

  int k = 4;                        // single-generator operations
  std::vector<int> k_grid = {2, 4, 8};
  std::int64_t max_support = kDefaultMaxSupport;

  std::vector<int> hidden_sizes = {48, 32};
  double weight_clip = 1.0;
  double init_scale = 0.1;

  double phi_delta = 1.0;
  double epsilon = 0.25;
  double lipschitz = 1.0;
  double phi_lipschitz = 1.0;

  int steps = 5000;
  double learning_rate = 0.05;
  double momentum = 0.9;
  int batch_size = 64;
  int restarts = 5;
  int holdout_size = 2000;

  std::int64_t n_real = 20000;
  std::int64_t n_fake = 20000;

  double compile_delta = 0.01;

  int identity_sets = 500;
  std::int64_t identity_direct = 8000;

  int concentration_trials = 50;
  int concentration_d_tilde = 2;
  std::vector<int> concentration_k_grid = {16, 32};

  int finite_sample_factor = 10;
  int finite_sample_k = 4;

  int birthday_samples = 40;
  int birthday_trials = 400;
  int birthday_k = 4;

  std::uint64_t master_seed = 20260809;
  int threads = 0;

  void validate() const;
  CleanImageModel image_model() const;
  TrainConfig train_config() const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

// Joint-pair oracles for the adversary. File-backed image models are
// materialized once and sampled uniformly so oracles stay pure.
PairOracle make_real_oracle(const CleanImageModel& model, const DimensionSpec& spec);
PairOracle make_fake_oracle(const MemorizingGenerator& gen);
// Fresh noised image paired with an independently re-randomized code;
// the distinguishable sanity case.
PairOracle make_mismatched_oracle(const CleanImageModel& model, const DimensionSpec& spec);

// One seed per block, in block order.
struct NonCollidingSet {
  std::vector<SeedVector> seeds;
};

NonCollidingSet sample_noncolliding(RandomStream& rng, const BlockPartition& part);

struct IdentityCheck {
  double stratified_mean = 0.0;
  double direct_mean = 0.0;
  double stratified_std_err = 0.0;
  double direct_std_err = 0.0;
  double z_score = 0.0;
};

// Stratified (non-colliding sets) vs direct Monte-Carlo estimate of
// E_z phi(D(G(z), z)); equal in expectation for any fixed D.
IdentityCheck check_noncolliding_identity(const Discriminator& disc,
                                          const MemorizingGenerator& gen,
                                          int n_sets, std::int64_t n_direct,
                                          RandomStream& rng, const MeasuringFunction& mf);

// Fraction of trials in which s generator draws contain two outputs equal
// on every non-spliced coordinate.
double run_birthday_trials(const MemorizingGenerator& gen, int s, int trials,
                           RandomStream& rng, int threads = 0);

struct ExperimentReport {
  nlohmann::json json;
  std::vector<std::string> csv_header;
  std::vector<std::vector<double>> csv_rows;
};

ExperimentReport run_collapse_experiment(const ExperimentConfig& cfg);
ExperimentReport run_concentration_experiment(const ExperimentConfig& cfg);
ExperimentReport run_finite_sample_experiment(const ExperimentConfig& cfg);
ExperimentReport run_birthday_experiment(const ExperimentConfig& cfg);

}  // namespace memgan
