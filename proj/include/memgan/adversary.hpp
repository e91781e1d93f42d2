#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "memgan/rng.hpp"
#include "memgan/types.hpp"

namespace memgan {

// phi(t) = Delta * tanh(t): bounded in [-Delta, Delta], concave on t >= 0,
// Lipschitz constant Delta.
struct MeasuringFunction {
  double delta = 1.0;  // range scale, >= 1
};

double phi(double t, const MeasuringFunction& mf);
double phi_derivative(double t, const MeasuringFunction& mf);

// Fully-connected scorer on the concatenation (x, z): ReLU hidden layers,
// linear output. Capacity p is the exact scalar parameter count; training
// keeps every parameter inside [-weight_clip, weight_clip].
class Discriminator {
 public:
  struct Dense {
    int rows = 0, cols = 0;
    std::vector<double> w;  // row-major rows*cols
    std::vector<double> b;  // rows
  };

  Discriminator() = default;
  Discriminator(std::vector<int> layer_sizes, double weight_clip);

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  std::vector<Dense>& layers() { return layers_; }
  const std::vector<Dense>& layers() const { return layers_; }
  double weight_clip() const { return weight_clip_; }
  std::int64_t capacity() const { return capacity_; }
  int input_dim() const { return layer_sizes_.front(); }

  void init_params(RandomStream& rng, double scale);

  double forward(const std::vector<double>& input) const;
  double forward(const ImageVector& x, const SeedVector& z) const;

  // Flattened parameter vector, per layer weights row-major then bias.
  std::vector<double> flatten() const;
  void unflatten(const std::vector<double>& params);

  nlohmann::json to_json() const;
  static Discriminator from_json(const nlohmann::json& j);

 private:
  std::vector<int> layer_sizes_;
  std::vector<Dense> layers_;
  double weight_clip_ = 1.0;
  std::int64_t capacity_ = 0;
};

struct BatchEntry {
  std::vector<double> input;  // concat(x, z)
  bool real = true;
};

// Gradient of mean_real phi(D) - mean_fake phi(D) over all parameters,
// in flatten() order.
std::vector<double> disc_gradient(const Discriminator& disc,
                                  const std::vector<BatchEntry>& batch,
                                  const MeasuringFunction& mf);

struct ObjectiveEstimate {
  double real_term = 0.0;
  double fake_term = 0.0;
  double gap = 0.0;
  std::int64_t n_real = 0;
  std::int64_t n_fake = 0;
  double std_err = 0.0;
};

// Joint-pair source; the adversary never sees seeds except through pairs.
using PairOracle = std::function<std::pair<ImageVector, SeedVector>(RandomStream&)>;

ObjectiveEstimate bigan_objective(const Discriminator& disc, const PairOracle& real,
                                  const PairOracle& fake, std::int64_t n_real,
                                  std::int64_t n_fake, RandomStream& rng,
                                  const MeasuringFunction& mf);

struct TrainConfig {
  int steps = 5000;
  double learning_rate = 0.05;
  double momentum = 0.9;
  int batch_size = 64;
  int restarts = 5;
  double weight_clip = 1.0;
  double init_scale = 0.1;
  int holdout_size = 2000;
  std::vector<int> hidden_sizes = {48, 32};
  int threads = 0;  // 0 = hardware concurrency
};

struct TraceRow {
  int step = 0;
  double real_term = 0.0;
  double fake_term = 0.0;
  double gap = 0.0;
  double grad_norm = 0.0;
};

struct TrainResult {
  Discriminator best;
  ObjectiveEstimate holdout;        // of the winning run, on held-out pairs
  std::vector<TraceRow> trace;      // of the winning run
  int best_restart = 0;
  int best_sign = 1;
};

// Multi-restart stochastic gradient ascent on the signed difference, with
// post-step clipping; both ascent directions run per restart and the
// winner is the run with the largest held-out |gap|. Restart r derives
// its streams from (rng, r), so growing `restarts` reuses earlier runs.
TrainResult train_discriminator(const RandomStream& rng, const PairOracle& real,
                                const PairOracle& fake, int input_dim,
                                const TrainConfig& cfg, const MeasuringFunction& mf);

struct LipschitzProbe {
  double max_ratio = 0.0;
  double analytic_bound = 0.0;
};

// Empirical parameter-Lipschitz probe at fixed random inputs, reported
// with a conservative layer-norm-product bound.
LipschitzProbe lipschitz_probe(const Discriminator& disc, int n_pairs,
                               double perturbation_scale, RandomStream& rng);

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace);

}  // namespace memgan
