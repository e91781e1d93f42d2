#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "memgan/rng.hpp"
#include "memgan/types.hpp"

namespace memgan {

// Equal-measure partition of R^d_tilde into m = k^d_tilde blocks. Each
// coordinate is cut independently into k cells of equal half-normal
// measure by thresholds 0 = tau_0 < tau_1 < ... < tau_{k-1} < tau_k = inf.
// Cells are half-open [tau_{i-1}, tau_i) so every point has a block.
struct BlockPartition {
  int k = 1;
  int d_tilde = 1;
  double sigma = 1.0;
  std::vector<double> thresholds;  // k-1 finite thresholds
  std::int64_t m = 1;              // k^d_tilde

  nlohmann::json to_json() const;
  static BlockPartition from_json(const nlohmann::json& j, std::int64_t max_support);
};

inline constexpr std::int64_t kDefaultMaxSupport = std::int64_t(1) << 30;

// P(|Z| <= t) for Z ~ N(0, sigma^2).
double half_normal_cdf(double t, double sigma);

// Quantile of the half-normal by bisection on the cdf, absolute
// tolerance 1e-12.
double half_normal_quantile(double p, double sigma);

// Builds the partition; thresholds solve cdf(tau_i) = i/k. Throws when
// k^d_tilde exceeds max_support or adjacent quantiles are numerically
// indistinguishable.
BlockPartition make_partition(int k, int d_tilde, double sigma,
                              std::int64_t max_support = kDefaultMaxSupport);

// Per-coordinate cell indices, each in [1, k].
std::vector<int> block_tuple(const SeedVector& z, const BlockPartition& part);

// Mixed-radix index, 1-based: ind = 1 + sum (i_j - 1) k^(j-1). Bijective
// between tuples and [1, m].
std::int64_t block_index(const std::vector<int>& tuple, const BlockPartition& part);

std::vector<int> decode_block_index(std::int64_t index, const BlockPartition& part);

// Conditional sample of the seed distribution inside the given block:
// per coordinate, inverse-cdf uniform in the cell's cdf range with an
// independent uniform sign. The result is clamped into the half-open
// cell so block_tuple always recovers the block.
SeedVector sample_within_block(RandomStream& rng, std::int64_t block,
                               const BlockPartition& part);

// Max absolute deviation of empirical block frequencies from 1/m over n
// seeds; requires n >= 10*m.
double verify_equipartition(const BlockPartition& part, std::int64_t n, RandomStream& rng);

}  // namespace memgan
