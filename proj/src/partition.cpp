#include "memgan/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace memgan {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

std::int64_t checked_power(int k, int d_tilde, std::int64_t max_support) {
  std::int64_t m = 1;
  for (int j = 0; j < d_tilde; ++j) {
    if (m > max_support / k)
      throw std::overflow_error("partition: k^d_tilde exceeds the maximum support");
    m *= k;
  }
  return m;
}

}  // namespace

double half_normal_cdf(double t, double sigma) {
  if (t <= 0.0) return 0.0;
  return std::erf(t / (sigma * kSqrt2));
}

double half_normal_quantile(double p, double sigma) {
  if (!(p >= 0.0) || !(p < 1.0))
    throw std::invalid_argument("half_normal_quantile: p must lie in [0, 1)");
  if (p == 0.0) return 0.0;
  double lo = 0.0, hi = sigma;
  while (half_normal_cdf(hi, sigma) < p) {
    hi *= 2.0;
    if (hi > sigma * 1e3)
      throw std::runtime_error("half_normal_quantile: bracket expansion failed");
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (half_normal_cdf(mid, sigma) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

BlockPartition make_partition(int k, int d_tilde, double sigma, std::int64_t max_support) {
  if (k < 1) throw std::invalid_argument("make_partition: k must be >= 1");
  if (d_tilde < 1) throw std::invalid_argument("make_partition: d_tilde must be >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("make_partition: sigma must be positive");

  BlockPartition part;
  part.k = k;
  part.d_tilde = d_tilde;
  part.sigma = sigma;
  part.m = checked_power(k, d_tilde, max_support);
  part.thresholds.resize(k - 1);
  for (int i = 1; i < k; ++i)
    part.thresholds[i - 1] = half_normal_quantile(static_cast<double>(i) / k, sigma);

  double prev = 0.0;
  for (double t : part.thresholds) {
    if (!(t > prev))
      throw std::runtime_error("make_partition: adjacent quantiles numerically indistinguishable");
    prev = t;
  }
  // analytic equipartition check: each cell holds 1/k of the measure
  double prev_cdf = 0.0;
  for (int i = 1; i < k; ++i) {
    const double c = half_normal_cdf(part.thresholds[i - 1], sigma);
    if (std::abs((c - prev_cdf) - 1.0 / k) > 1e-10)
      throw std::runtime_error("make_partition: equipartition check failed");
    prev_cdf = c;
  }
  return part;
}

std::vector<int> block_tuple(const SeedVector& z, const BlockPartition& part) {
  require_dim(z, part.d_tilde, "block_tuple: z");
  std::vector<int> tuple(part.d_tilde);
  for (int j = 0; j < part.d_tilde; ++j) {
    const double a = std::abs(z[j]);
    // cell i holds |z| in [tau_{i-1}, tau_i); a == tau_i lands in cell i+1
    const auto it = std::upper_bound(part.thresholds.begin(), part.thresholds.end(), a);
    tuple[j] = 1 + static_cast<int>(it - part.thresholds.begin());
  }
  return tuple;
}

std::int64_t block_index(const std::vector<int>& tuple, const BlockPartition& part) {
  if (static_cast<int>(tuple.size()) != part.d_tilde)
    throw std::invalid_argument("block_index: tuple length mismatch");
  std::int64_t ind = 0, radix = 1;
  for (int j = 0; j < part.d_tilde; ++j) {
    if (tuple[j] < 1 || tuple[j] > part.k)
      throw std::invalid_argument("block_index: tuple entry out of [1, k]");
    ind += static_cast<std::int64_t>(tuple[j] - 1) * radix;
    radix *= part.k;
  }
  return ind + 1;
}

std::vector<int> decode_block_index(std::int64_t index, const BlockPartition& part) {
  if (index < 1 || index > part.m)
    throw std::invalid_argument("decode_block_index: index out of [1, m]");
  std::vector<int> tuple(part.d_tilde);
  std::int64_t rem = index - 1;
  for (int j = 0; j < part.d_tilde; ++j) {
    tuple[j] = 1 + static_cast<int>(rem % part.k);
    rem /= part.k;
  }
  return tuple;
}

SeedVector sample_within_block(RandomStream& rng, std::int64_t block,
                               const BlockPartition& part) {
  const std::vector<int> tuple = decode_block_index(block, part);
  SeedVector z(part.d_tilde);
  for (int j = 0; j < part.d_tilde; ++j) {
    const int cell = tuple[j];
    const double p = (cell - 1 + rng.uniform01()) / part.k;
    double a = half_normal_quantile(p, part.sigma);
    // clamp into the half-open cell so membership is exact, not just
    // within bisection tolerance
    const double lo = cell == 1 ? 0.0 : part.thresholds[cell - 2];
    if (a < lo) a = lo;
    if (cell <= part.k - 1) {
      const double hi = part.thresholds[cell - 1];
      if (a >= hi) a = std::nextafter(hi, lo);
    }
    z[j] = a * rng.sign();
  }
  return z;
}

double verify_equipartition(const BlockPartition& part, std::int64_t n, RandomStream& rng) {
  if (n < 10 * part.m)
    throw std::invalid_argument("verify_equipartition: need n >= 10*m");
  std::vector<std::int64_t> counts(part.m, 0);
  SeedVector z(part.d_tilde);
  for (std::int64_t i = 0; i < n; ++i) {
    for (double& v : z) v = rng.gaussian(part.sigma);
    ++counts[block_index(block_tuple(z, part), part) - 1];
  }
  double max_dev = 0.0;
  for (std::int64_t c : counts)
    max_dev = std::max(max_dev, std::abs(static_cast<double>(c) / n - 1.0 / part.m));
  return max_dev;
}

nlohmann::json BlockPartition::to_json() const {
  nlohmann::json j;
  j["k"] = k;
  j["d_tilde"] = d_tilde;
  j["sigma"] = sigma;
  j["thresholds"] = thresholds;
  return j;
}

BlockPartition BlockPartition::from_json(const nlohmann::json& j, std::int64_t max_support) {
  BlockPartition part;
  part.k = j.at("k").get<int>();
  part.d_tilde = j.at("d_tilde").get<int>();
  part.sigma = j.at("sigma").get<double>();
  part.thresholds = j.at("thresholds").get<std::vector<double>>();
  if (part.k < 1 || part.d_tilde < 1 || !(part.sigma > 0.0))
    throw std::invalid_argument("BlockPartition: invalid serialized fields");
  if (static_cast<int>(part.thresholds.size()) != part.k - 1)
    throw std::invalid_argument("BlockPartition: thresholds size != k-1");
  double prev = 0.0;
  for (double t : part.thresholds) {
    if (!(t > prev) || !std::isfinite(t))
      throw std::invalid_argument("BlockPartition: thresholds not increasing and positive");
    prev = t;
  }
  part.m = checked_power(part.k, part.d_tilde, max_support);
  return part;
}

}  // namespace memgan
