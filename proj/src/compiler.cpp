#include "memgan/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "memgan/noise_channel.hpp"

namespace memgan {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

double min_threshold_gap(const BlockPartition& part) {
  // tau_0 = 0 counts: the first gap is tau_1 itself
  double gap = part.thresholds.empty() ? 0.0 : part.thresholds.front();
  for (std::size_t i = 1; i < part.thresholds.size(); ++i)
    gap = std::min(gap, part.thresholds[i] - part.thresholds[i - 1]);
  return gap;
}

std::size_t count_biases(const ReluNetwork& net) {
  std::size_t n = 0;
  for (const auto& l : net.layers())
    for (double b : l.bias)
      if (b != 0.0) ++n;
  return n;
}

// The selector stages, shared by the standalone fragment and the full
// pipeline. Input columns [abs_0..abs_{dt-1}]; rows of the final stage
// hold the k*dt bits. `carry` appends pass-through columns/rows that the
// full pipeline uses to keep the seed alive across the stages.
struct SelectorStages {
  SparseLayer ramp;   // A_{j,i} = relu((|z_j| - tau_i)/w + 1)
  SparseLayer clip;   // C_{j,i} = relu(1 - A_{j,i})
  SparseLayer bits;   // b_{j,i} = C_{j,i} - C_{j,i-1}, C_{j,0} = 0, C_{j,k} = 1
};

SelectorStages selector_stages(const BlockPartition& part, double w, int in_cols,
                               int abs_offset, int carry_cols) {
  const int dt = part.d_tilde;
  const int k = part.k;
  const int nA = (k - 1) * dt;

  std::vector<Triplet> ramp_trips;
  std::vector<double> ramp_bias(nA + carry_cols, 0.0);
  for (int j = 0; j < dt; ++j)
    for (int i = 1; i < k; ++i) {
      const int r = j * (k - 1) + (i - 1);
      const double tau = part.thresholds[i - 1];
      if (carry_cols > 0) {
        // |z_j| arrives as relu(z_j) + relu(-z_j)
        ramp_trips.push_back({r, abs_offset + j, 1.0 / w});
        ramp_trips.push_back({r, abs_offset + dt + j, 1.0 / w});
      } else {
        ramp_trips.push_back({r, abs_offset + j, 1.0 / w});
      }
      ramp_bias[r] = 1.0 - tau / w;
    }
  std::vector<Triplet> clip_trips;
  std::vector<double> clip_bias(nA + carry_cols, 0.0);
  for (int r = 0; r < nA; ++r) {
    clip_trips.push_back({r, r, -1.0});
    clip_bias[r] = 1.0;
  }
  std::vector<Triplet> bit_trips;
  std::vector<double> bit_bias(k * dt + carry_cols, 0.0);
  for (int j = 0; j < dt; ++j)
    for (int i = 1; i <= k; ++i) {
      const int r = j * k + (i - 1);
      const int c_lo = j * (k - 1) + (i - 2);  // C_{j,i-1}
      const int c_hi = j * (k - 1) + (i - 1);  // C_{j,i}
      if (i < k) bit_trips.push_back({r, c_hi, 1.0});
      if (i > 1) bit_trips.push_back({r, c_lo, -1.0});
      if (i == k) bit_bias[r] = 1.0;
    }

  SelectorStages s;
  s.ramp = SparseLayer(nA + carry_cols, in_cols, std::move(ramp_trips),
                       std::move(ramp_bias), Activation::relu);
  s.clip = SparseLayer(nA + carry_cols, nA + carry_cols, std::move(clip_trips),
                       std::move(clip_bias), Activation::relu);
  s.bits = SparseLayer(k * dt + carry_cols, nA + carry_cols, std::move(bit_trips),
                       std::move(bit_bias), Activation::relu);
  return s;
}

void append_carry(SparseLayer& layer, int row_offset, int col_offset, int n) {
  // identity wires for non-negative carried values (relu is a no-op)
  std::vector<Triplet> trips = layer.triplets;
  for (int i = 0; i < n; ++i) trips.push_back({row_offset + i, col_offset + i, 1.0});
  layer = SparseLayer(layer.rows, layer.cols, std::move(trips), layer.bias,
                      layer.activation);
}

SparseLayer onehot_layer(const BlockPartition& part, int in_cols, int bits_offset,
                         int carry_rows) {
  const int dt = part.d_tilde;
  const int k = part.k;
  std::vector<Triplet> trips;
  std::vector<double> bias(part.m + carry_rows, 0.0);
  for (std::int64_t t = 1; t <= part.m; ++t) {
    const std::vector<int> tuple = decode_block_index(t, part);
    for (int j = 0; j < dt; ++j)
      trips.push_back({static_cast<int>(t - 1), bits_offset + j * k + tuple[j] - 1, 1.0});
    bias[t - 1] = -static_cast<double>(dt - 1);
  }
  return SparseLayer(static_cast<int>(part.m) + carry_rows, in_cols, std::move(trips),
                     std::move(bias), Activation::relu);
}

}  // namespace

ReluNetwork compile_abs(int d_tilde) {
  if (d_tilde < 1) throw std::invalid_argument("compile_abs: d_tilde < 1");
  std::vector<Triplet> split;
  for (int j = 0; j < d_tilde; ++j) {
    split.push_back({j, j, 1.0});
    split.push_back({d_tilde + j, j, -1.0});
  }
  SparseLayer l1(2 * d_tilde, d_tilde, std::move(split),
                 std::vector<double>(2 * d_tilde, 0.0), Activation::relu);
  std::vector<Triplet> join;
  for (int j = 0; j < d_tilde; ++j) {
    join.push_back({j, j, 1.0});
    join.push_back({j, d_tilde + j, 1.0});
  }
  SparseLayer l2(d_tilde, 2 * d_tilde, std::move(join),
                 std::vector<double>(d_tilde, 0.0), Activation::identity);
  return ReluNetwork(d_tilde, {std::move(l1), std::move(l2)});
}

ReluNetwork compile_selector(const BlockPartition& part, double ramp_width) {
  const int dt = part.d_tilde;
  if (part.k == 1) {
    // single cell per coordinate: the bit is constantly 1
    SparseLayer ones(dt, dt, {}, std::vector<double>(dt, 1.0), Activation::relu);
    return ReluNetwork(dt, {std::move(ones)});
  }
  const double gap = min_threshold_gap(part);
  if (!(ramp_width > 0.0) || !(ramp_width < gap))
    throw std::invalid_argument("compile_selector: need 0 < ramp_width < min threshold gap");
  SelectorStages s = selector_stages(part, ramp_width, dt, 0, 0);
  return ReluNetwork(dt, {std::move(s.ramp), std::move(s.clip), std::move(s.bits)});
}

ReluNetwork compile_onehot(const BlockPartition& part) {
  return ReluNetwork(part.k * part.d_tilde,
                     {onehot_layer(part, part.k * part.d_tilde, 0, 0)});
}

ReluNetwork compile_memory(const MemorizingGenerator& gen) {
  gen.validate();
  const int d = gen.spec.d;
  const int dt = gen.spec.d_tilde;
  const std::vector<int> pos = spliced_positions(gen.spec);
  std::vector<Triplet> trips;
  int row = 0;
  int next_spliced = 0;
  for (int c = 0; c < d; ++c) {
    if (next_spliced < dt && c + 1 == pos[next_spliced]) {
      ++next_spliced;
      continue;
    }
    for (std::int64_t t = 0; t < gen.partition.m; ++t) {
      const double v = gen.memorized[t][c];
      if (v != 0.0) trips.push_back({row, static_cast<int>(t), v});
    }
    ++row;
  }
  SparseLayer mem(d - dt, static_cast<int>(gen.partition.m), std::move(trips),
                  std::vector<double>(d - dt, 0.0), Activation::identity);
  return ReluNetwork(static_cast<int>(gen.partition.m), {std::move(mem)});
}

std::pair<ReluNetwork, CompileReport> compile_generator(const MemorizingGenerator& gen,
                                                        double delta) {
  gen.validate();
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("compile_generator: delta must lie in (0, 1)");
  const BlockPartition& part = gen.partition;
  const int dt = gen.spec.d_tilde;
  const int d = gen.spec.d;
  const int k = part.k;
  const auto m = static_cast<int>(part.m);

  // Ambiguous mass per finite threshold is at most w * f_max with
  // f_max = sqrt(2/pi)/sigma, so w = delta*sigma/(2*dt*k)*sqrt(pi/2)
  // keeps the union over coordinates below delta.
  double w = delta * part.sigma / (2.0 * dt * k) * std::sqrt(kHalfPi);
  if (k > 1) {
    w = std::min(w, 0.5 * min_threshold_gap(part));
    if (!(w > part.sigma * 1e-10))
      throw std::runtime_error("compile_generator: delta too small for float precision");
  }

  std::vector<SparseLayer> layers;

  // split: p_j = relu(z_j), n_j = relu(-z_j); carried to the last layer
  {
    std::vector<Triplet> trips;
    for (int j = 0; j < dt; ++j) {
      trips.push_back({j, j, 1.0});
      trips.push_back({dt + j, j, -1.0});
    }
    layers.emplace_back(2 * dt, dt, std::move(trips), std::vector<double>(2 * dt, 0.0),
                        Activation::relu);
  }

  int bits_rows;
  if (k > 1) {
    SelectorStages s = selector_stages(part, w, 2 * dt, 0, 2 * dt);
    const int nA = (k - 1) * dt;
    append_carry(s.ramp, nA, 0, 2 * dt);
    append_carry(s.clip, nA, nA, 2 * dt);
    append_carry(s.bits, k * dt, nA, 2 * dt);
    bits_rows = k * dt;
    layers.push_back(std::move(s.ramp));
    layers.push_back(std::move(s.clip));
    layers.push_back(std::move(s.bits));
  } else {
    SparseLayer ones(dt + 2 * dt, 2 * dt, {}, std::vector<double>(3 * dt, 0.0),
                     Activation::relu);
    for (int j = 0; j < dt; ++j) ones.bias[j] = 1.0;
    append_carry(ones, dt, 0, 2 * dt);
    bits_rows = dt;
    layers.push_back(std::move(ones));
  }

  {
    SparseLayer onehot = onehot_layer(part, bits_rows + 2 * dt, 0, 2 * dt);
    append_carry(onehot, m, bits_rows, 2 * dt);
    layers.push_back(std::move(onehot));
  }

  // memory + splice wiring into the final d outputs
  {
    const std::vector<int> pos = spliced_positions(gen.spec);
    std::vector<Triplet> trips;
    int next_spliced = 0;
    for (int c = 0; c < d; ++c) {
      if (next_spliced < dt && c + 1 == pos[next_spliced]) {
        const int j = next_spliced;
        trips.push_back({c, m + j, 1.0});        // + relu(z_j)
        trips.push_back({c, m + dt + j, -1.0});  // - relu(-z_j)
        ++next_spliced;
        continue;
      }
      for (int t = 0; t < m; ++t) {
        const double v = gen.memorized[t][c];
        if (v != 0.0) trips.push_back({c, t, v});
      }
    }
    layers.emplace_back(d, m + 2 * dt, std::move(trips), std::vector<double>(d, 0.0),
                        Activation::identity);
  }

  ReluNetwork net(dt, std::move(layers));
  CompileReport report;
  report.nonzero_weights = net.nonzero_weights();
  report.nonzero_biases = count_biases(net);
  report.delta = delta;
  report.ramp_width = k > 1 ? w : 0.0;
  report.predicted_bound = static_cast<std::size_t>(part.m) * (d - dt) +
                           static_cast<std::size_t>(part.m) * (dt + 1) +
                           4u * k * dt + 4u * dt + d;
  return {std::move(net), report};
}

double compiled_disagreement(const MemorizingGenerator& gen, const ReluNetwork& net,
                             std::int64_t n, RandomStream& rng) {
  if (n < 1) throw std::invalid_argument("compiled_disagreement: n < 1");
  std::int64_t bad = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const SeedVector z = sample_seed(rng, gen.spec);
    if (net.forward(z) != generate(gen, z)) ++bad;
  }
  return static_cast<double>(bad) / static_cast<double>(n);
}

}  // namespace memgan
