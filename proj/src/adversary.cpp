#include "memgan/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "memgan/parallel.hpp"

namespace memgan {

double phi(double t, const MeasuringFunction& mf) { return mf.delta * std::tanh(t); }

double phi_derivative(double t, const MeasuringFunction& mf) {
  const double th = std::tanh(t);
  return mf.delta * (1.0 - th * th);
}

Discriminator::Discriminator(std::vector<int> layer_sizes, double weight_clip)
    : layer_sizes_(std::move(layer_sizes)), weight_clip_(weight_clip) {
  if (layer_sizes_.size() < 2)
    throw std::invalid_argument("Discriminator: need at least input and output sizes");
  if (layer_sizes_.back() != 1)
    throw std::invalid_argument("Discriminator: output size must be 1");
  for (int s : layer_sizes_)
    if (s < 1) throw std::invalid_argument("Discriminator: layer sizes must be positive");
  if (!(weight_clip_ > 0.0))
    throw std::invalid_argument("Discriminator: weight_clip must be positive");
  capacity_ = 0;
  for (std::size_t l = 1; l < layer_sizes_.size(); ++l) {
    Dense d;
    d.rows = layer_sizes_[l];
    d.cols = layer_sizes_[l - 1];
    d.w.assign(static_cast<std::size_t>(d.rows) * d.cols, 0.0);
    d.b.assign(d.rows, 0.0);
    capacity_ += static_cast<std::int64_t>(d.rows) * d.cols + d.rows;
    layers_.push_back(std::move(d));
  }
}

void Discriminator::init_params(RandomStream& rng, double scale) {
  for (auto& l : layers_) {
    for (double& v : l.w) v = rng.uniform(-scale, scale);
    for (double& v : l.b) v = rng.uniform(-scale, scale);
  }
}

namespace {

struct ForwardCache {
  std::vector<std::vector<double>> acts;  // acts[0] = input
  std::vector<std::vector<double>> pres;  // pre-activations per layer
};

double forward_cached(const Discriminator& disc, const std::vector<double>& input,
                      ForwardCache* cache) {
  const auto& layers = disc.layers();
  std::vector<double> a = input, pre;
  if (cache) {
    cache->acts.assign(1, a);
    cache->pres.clear();
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& L = layers[l];
    pre.assign(L.rows, 0.0);
    for (int r = 0; r < L.rows; ++r) {
      const double* wr = L.w.data() + static_cast<std::size_t>(r) * L.cols;
      double s = L.b[r];
      for (int c = 0; c < L.cols; ++c) s += wr[c] * a[c];
      pre[r] = s;
    }
    if (cache) cache->pres.push_back(pre);
    if (l + 1 < layers.size())
      for (double& v : pre) v = v > 0.0 ? v : 0.0;
    a = pre;
    if (cache) cache->acts.push_back(a);
  }
  return a[0];
}

}  // namespace

double Discriminator::forward(const std::vector<double>& input) const {
  if (static_cast<int>(input.size()) != layer_sizes_.front())
    throw std::invalid_argument("Discriminator::forward: input dimension mismatch");
  return forward_cached(*this, input, nullptr);
}

double Discriminator::forward(const ImageVector& x, const SeedVector& z) const {
  std::vector<double> input;
  input.reserve(x.size() + z.size());
  input.insert(input.end(), x.begin(), x.end());
  input.insert(input.end(), z.begin(), z.end());
  return forward(input);
}

std::vector<double> Discriminator::flatten() const {
  std::vector<double> out;
  out.reserve(capacity_);
  for (const auto& l : layers_) {
    out.insert(out.end(), l.w.begin(), l.w.end());
    out.insert(out.end(), l.b.begin(), l.b.end());
  }
  return out;
}

void Discriminator::unflatten(const std::vector<double>& params) {
  if (static_cast<std::int64_t>(params.size()) != capacity_)
    throw std::invalid_argument("Discriminator::unflatten: size mismatch");
  std::size_t off = 0;
  for (auto& l : layers_) {
    std::copy(params.begin() + off, params.begin() + off + l.w.size(), l.w.begin());
    off += l.w.size();
    std::copy(params.begin() + off, params.begin() + off + l.b.size(), l.b.begin());
    off += l.b.size();
  }
}

nlohmann::json Discriminator::to_json() const {
  nlohmann::json j;
  j["layer_sizes"] = layer_sizes_;
  j["weight_clip"] = weight_clip_;
  auto layers = nlohmann::json::array();
  for (const auto& l : layers_) layers.push_back({{"weights", l.w}, {"bias", l.b}});
  j["layers"] = std::move(layers);
  return j;
}

Discriminator Discriminator::from_json(const nlohmann::json& j) {
  Discriminator d(j.at("layer_sizes").get<std::vector<int>>(),
                  j.at("weight_clip").get<double>());
  const auto& layers = j.at("layers");
  if (layers.size() != d.layers_.size())
    throw std::invalid_argument("Discriminator: layer count mismatch");
  for (std::size_t l = 0; l < d.layers_.size(); ++l) {
    auto w = layers[l].at("weights").get<std::vector<double>>();
    auto b = layers[l].at("bias").get<std::vector<double>>();
    if (w.size() != d.layers_[l].w.size() || b.size() != d.layers_[l].b.size())
      throw std::invalid_argument("Discriminator: parameter shape mismatch");
    d.layers_[l].w = std::move(w);
    d.layers_[l].b = std::move(b);
  }
  return d;
}

namespace {

// Accumulates d(objective)/d(params) for one sample; dscore is the
// derivative of the objective with respect to the raw score.
void backprop_sample(const Discriminator& disc, const ForwardCache& cache, double dscore,
                     std::vector<double>& grad) {
  const auto& layers = disc.layers();
  const int L = static_cast<int>(layers.size());
  std::vector<double> delta(1, dscore), prev;

  // offsets of each layer's weight block inside the flat gradient
  std::vector<std::size_t> offs(L);
  std::size_t off = 0;
  for (int l = 0; l < L; ++l) {
    offs[l] = off;
    off += layers[l].w.size() + layers[l].b.size();
  }

  for (int l = L - 1; l >= 0; --l) {
    const auto& Ld = layers[l];
    const auto& a_in = cache.acts[l];
    double* gw = grad.data() + offs[l];
    double* gb = gw + Ld.w.size();
    for (int r = 0; r < Ld.rows; ++r) {
      const double dr = delta[r];
      if (dr == 0.0) continue;
      double* gwr = gw + static_cast<std::size_t>(r) * Ld.cols;
      for (int c = 0; c < Ld.cols; ++c) gwr[c] += dr * a_in[c];
      gb[r] += dr;
    }
    if (l == 0) break;
    prev.assign(Ld.cols, 0.0);
    for (int r = 0; r < Ld.rows; ++r) {
      const double dr = delta[r];
      if (dr == 0.0) continue;
      const double* wr = Ld.w.data() + static_cast<std::size_t>(r) * Ld.cols;
      for (int c = 0; c < Ld.cols; ++c) prev[c] += wr[c] * dr;
    }
    const auto& pre = cache.pres[l - 1];
    for (int c = 0; c < static_cast<int>(prev.size()); ++c)
      if (pre[c] <= 0.0) prev[c] = 0.0;  // relu subgradient, 0 at the kink
    delta = prev;
  }
}

}  // namespace

std::vector<double> disc_gradient(const Discriminator& disc,
                                  const std::vector<BatchEntry>& batch,
                                  const MeasuringFunction& mf) {
  if (batch.empty()) throw std::invalid_argument("disc_gradient: empty batch");
  std::int64_t n_real = 0, n_fake = 0;
  for (const auto& e : batch) (e.real ? n_real : n_fake)++;
  std::vector<double> grad(disc.capacity(), 0.0);
  ForwardCache cache;
  for (const auto& e : batch) {
    const double score = forward_cached(disc, e.input, &cache);
    const double coef = e.real ? (n_real > 0 ? 1.0 / n_real : 0.0)
                               : (n_fake > 0 ? -1.0 / n_fake : 0.0);
    backprop_sample(disc, cache, coef * phi_derivative(score, mf), grad);
  }
  return grad;
}

ObjectiveEstimate bigan_objective(const Discriminator& disc, const PairOracle& real,
                                  const PairOracle& fake, std::int64_t n_real,
                                  std::int64_t n_fake, RandomStream& rng,
                                  const MeasuringFunction& mf) {
  if (n_real < 2 || n_fake < 2)
    throw std::invalid_argument("bigan_objective: need n_real, n_fake >= 2");
  auto accumulate = [&](const PairOracle& oracle, std::int64_t n, double& mean,
                        double& var) {
    mean = 0.0;
    double m2 = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const auto [x, z] = oracle(rng);
      const double v = phi(disc.forward(x, z), mf);
      const double delta = v - mean;
      mean += delta / (i + 1);
      m2 += delta * (v - mean);
    }
    var = m2 / (n - 1);
  };
  ObjectiveEstimate est;
  est.n_real = n_real;
  est.n_fake = n_fake;
  double var_r = 0.0, var_f = 0.0;
  accumulate(real, n_real, est.real_term, var_r);
  accumulate(fake, n_fake, est.fake_term, var_f);
  est.gap = std::abs(est.real_term - est.fake_term);
  est.std_err = std::sqrt(var_r / n_real + var_f / n_fake);
  return est;
}

namespace {

ObjectiveEstimate holdout_estimate(const Discriminator& disc,
                                   const std::vector<BatchEntry>& holdout,
                                   const MeasuringFunction& mf) {
  double mean_r = 0.0, mean_f = 0.0, m2_r = 0.0, m2_f = 0.0;
  std::int64_t n_r = 0, n_f = 0;
  for (const auto& e : holdout) {
    const double v = phi(disc.forward(e.input), mf);
    double& mean = e.real ? mean_r : mean_f;
    double& m2 = e.real ? m2_r : m2_f;
    std::int64_t& n = e.real ? n_r : n_f;
    ++n;
    const double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
  ObjectiveEstimate est;
  est.real_term = mean_r;
  est.fake_term = mean_f;
  est.n_real = n_r;
  est.n_fake = n_f;
  est.gap = std::abs(mean_r - mean_f);
  est.std_err = std::sqrt(m2_r / (n_r - 1) / n_r + m2_f / (n_f - 1) / n_f);
  return est;
}

}  // namespace

TrainResult train_discriminator(const RandomStream& rng, const PairOracle& real,
                                const PairOracle& fake, int input_dim,
                                const TrainConfig& cfg, const MeasuringFunction& mf) {
  if (cfg.restarts < 1) throw std::invalid_argument("train_discriminator: restarts < 1");
  if (cfg.steps < 0) throw std::invalid_argument("train_discriminator: steps < 0");
  if (cfg.batch_size < 1 || cfg.holdout_size < 2)
    throw std::invalid_argument("train_discriminator: batch/holdout too small");

  std::vector<int> layer_sizes;
  layer_sizes.push_back(input_dim);
  for (int h : cfg.hidden_sizes) layer_sizes.push_back(h);
  layer_sizes.push_back(1);

  // shared held-out pairs, disjoint stream from all training data
  std::vector<BatchEntry> holdout;
  {
    RandomStream hs = rng.derive("train.holdout");
    for (int i = 0; i < cfg.holdout_size; ++i) {
      const auto [x, z] = real(hs);
      BatchEntry e;
      e.input.insert(e.input.end(), x.begin(), x.end());
      e.input.insert(e.input.end(), z.begin(), z.end());
      e.real = true;
      holdout.push_back(std::move(e));
    }
    for (int i = 0; i < cfg.holdout_size; ++i) {
      const auto [x, z] = fake(hs);
      BatchEntry e;
      e.input.insert(e.input.end(), x.begin(), x.end());
      e.input.insert(e.input.end(), z.begin(), z.end());
      e.real = false;
      holdout.push_back(std::move(e));
    }
  }

  struct RunOutcome {
    Discriminator disc;
    ObjectiveEstimate holdout;
    std::vector<TraceRow> trace;
  };
  const int n_runs = 2 * cfg.restarts;
  std::vector<RunOutcome> outcomes(n_runs);

  parallel_for(n_runs, cfg.threads, [&](std::size_t run) {
    const int restart = static_cast<int>(run) / 2;
    const double sign = (run % 2 == 0) ? 1.0 : -1.0;

    Discriminator disc(layer_sizes, cfg.weight_clip);
    RandomStream init = rng.derive("train.init", restart);
    disc.init_params(init, cfg.init_scale);
    RandomStream data = rng.derive("train.data", run);

    std::vector<double> velocity(disc.capacity(), 0.0);
    std::vector<BatchEntry> batch;
    std::vector<TraceRow> trace;
    trace.reserve(cfg.steps);
    for (int step = 0; step < cfg.steps; ++step) {
      batch.clear();
      for (int i = 0; i < cfg.batch_size; ++i) {
        const auto [x, z] = real(data);
        BatchEntry e;
        e.input.insert(e.input.end(), x.begin(), x.end());
        e.input.insert(e.input.end(), z.begin(), z.end());
        e.real = true;
        batch.push_back(std::move(e));
      }
      for (int i = 0; i < cfg.batch_size; ++i) {
        const auto [x, z] = fake(data);
        BatchEntry e;
        e.input.insert(e.input.end(), x.begin(), x.end());
        e.input.insert(e.input.end(), z.begin(), z.end());
        e.real = false;
        batch.push_back(std::move(e));
      }
      const std::vector<double> grad = disc_gradient(disc, batch, mf);

      double mean_r = 0.0, mean_f = 0.0, gnorm2 = 0.0;
      for (const auto& e : batch) {
        const double v = phi(disc.forward(e.input), mf);
        (e.real ? mean_r : mean_f) += v / cfg.batch_size;
      }
      for (double g : grad) gnorm2 += g * g;
      trace.push_back({step, mean_r, mean_f, std::abs(mean_r - mean_f), std::sqrt(gnorm2)});

      std::vector<double> params = disc.flatten();
      for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = cfg.momentum * velocity[i] + sign * grad[i];
        params[i] = std::clamp(params[i] + cfg.learning_rate * velocity[i],
                               -cfg.weight_clip, cfg.weight_clip);
      }
      disc.unflatten(params);
    }
    ObjectiveEstimate est = holdout_estimate(disc, holdout, mf);
    outcomes[run] = {std::move(disc), est, std::move(trace)};
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r)
    if (outcomes[r].holdout.gap > outcomes[best].holdout.gap) best = r;

  TrainResult result;
  result.best = std::move(outcomes[best].disc);
  result.holdout = outcomes[best].holdout;
  result.trace = std::move(outcomes[best].trace);
  result.best_restart = static_cast<int>(best) / 2;
  result.best_sign = best % 2 == 0 ? 1 : -1;
  return result;
}

LipschitzProbe lipschitz_probe(const Discriminator& disc, int n_pairs,
                               double perturbation_scale, RandomStream& rng) {
  if (n_pairs < 1) throw std::invalid_argument("lipschitz_probe: n_pairs < 1");
  if (!(perturbation_scale > 0.0))
    throw std::invalid_argument("lipschitz_probe: perturbation scale must be positive");

  const int n_inputs = 16;
  std::vector<std::vector<double>> inputs(n_inputs,
                                          std::vector<double>(disc.input_dim()));
  double max_input_norm = 0.0;
  for (auto& in : inputs) {
    double n2 = 0.0;
    for (double& v : in) {
      v = rng.gaussian(1.0);
      n2 += v * v;
    }
    max_input_norm = std::max(max_input_norm, std::sqrt(n2));
  }
  std::vector<double> base_scores(n_inputs);
  for (int i = 0; i < n_inputs; ++i) base_scores[i] = disc.forward(inputs[i]);

  const std::vector<double> theta = disc.flatten();
  Discriminator probe = disc;
  LipschitzProbe result;
  for (int p = 0; p < n_pairs; ++p) {
    std::vector<double> delta(theta.size());
    double n2 = 0.0;
    for (double& v : delta) {
      v = rng.gaussian(1.0);
      n2 += v * v;
    }
    const double scale = perturbation_scale / std::sqrt(n2);
    std::vector<double> shifted = theta;
    for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += delta[i] * scale;
    probe.unflatten(shifted);
    for (int i = 0; i < n_inputs; ++i) {
      const double ratio =
          std::abs(probe.forward(inputs[i]) - base_scores[i]) / perturbation_scale;
      result.max_ratio = std::max(result.max_ratio, ratio);
    }
  }

  // gradient-norm bound along the perturbation segment, using Frobenius
  // norms inflated by the perturbation radius
  const auto& layers = disc.layers();
  std::vector<double> frob(layers.size()), bnorm(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    double f2 = 0.0, b2 = 0.0;
    for (double v : layers[l].w) f2 += v * v;
    for (double v : layers[l].b) b2 += v * v;
    frob[l] = std::sqrt(f2) + perturbation_scale;
    bnorm[l] = std::sqrt(b2) + perturbation_scale;
  }
  std::vector<double> act_norm(layers.size() + 1);
  act_norm[0] = max_input_norm;
  for (std::size_t l = 0; l < layers.size(); ++l)
    act_norm[l + 1] = frob[l] * act_norm[l] + bnorm[l];
  double bound2 = 0.0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    double sens = 1.0;
    for (std::size_t j = l + 1; j < layers.size(); ++j) sens *= frob[j];
    bound2 += sens * sens * (act_norm[l] * act_norm[l] + 1.0);
  }
  result.analytic_bound = std::sqrt(bound2);
  return result;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
  out << "step,real_term,fake_term,gap,grad_norm\n";
  char buf[160];
  for (const auto& row : trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", row.step,
                  row.real_term, row.fake_term, row.gap, row.grad_norm);
    out << buf;
  }
}

}  // namespace memgan
