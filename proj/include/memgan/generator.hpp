#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "memgan/distributions.hpp"
#include "memgan/partition.hpp"
#include "memgan/rng.hpp"
#include "memgan/types.hpp"

namespace memgan {

// Capacity/regularity budget the support-size formula is evaluated at.
struct TheoremBudget {
  std::int64_t p = 1;    // discriminator parameter count
  double delta = 1.0;    // range bound of the measuring function, >= 1
  double lipschitz = 1.0;        // discriminator Lipschitz constant L
  double phi_lipschitz = 1.0;    // measuring-function Lipschitz constant
  double epsilon = 0.25;         // target objective gap

  void validate() const;
};

// ceil(p * delta^2 * ln^2(p * delta * L * L_phi / epsilon) / epsilon^2),
// clamped to at least 1. Natural logarithm.
std::int64_t theorem_support_size(const TheoremBudget& budget);

// Smallest k with k^d_tilde >= m_target.
int smallest_k_for_support(std::int64_t m_target, int d_tilde);

// Finite-support generator: m memorized clean images, one per partition
// block; generate(z) splices z into the image of z's block.
struct MemorizingGenerator {
  BlockPartition partition;
  DimensionSpec spec;
  std::vector<ImageVector> memorized;  // size m, each of dimension d

  void validate() const;
};

MemorizingGenerator build_generator(RandomStream& rng, const BlockPartition& partition,
                                    CleanImageModel& image_model, const DimensionSpec& spec);

ImageVector generate(const MemorizingGenerator& gen, const SeedVector& z);

// Distinct non-spliced patterns over n samples; bounded by m.
std::int64_t support_census(const MemorizingGenerator& gen, std::int64_t n_samples,
                            RandomStream& rng);

// Directory layout: partition.json + images.bin/.json in the flat-binary
// image format.
void save_generator(const MemorizingGenerator& gen, const std::filesystem::path& dir);
MemorizingGenerator load_generator(const std::filesystem::path& dir,
                                   std::int64_t max_support = kDefaultMaxSupport);

}  // namespace memgan
