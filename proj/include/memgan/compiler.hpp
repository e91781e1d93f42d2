#pragma once

#include <cstdint>

#include "memgan/generator.hpp"
#include "memgan/relu.hpp"

namespace memgan {

struct CompileReport {
  std::size_t nonzero_weights = 0;
  std::size_t nonzero_biases = 0;
  double delta = 0.0;       // target total-variation gap
  double ramp_width = 0.0;  // selector ramp half-width
  std::size_t predicted_bound = 0;  // m(d-dt) + m(dt+1) + 4k*dt + 4*dt + d
};

// z -> (|z_1|, ..., |z_dt|), exactly; 4*dt non-zero weights.
ReluNetwork compile_abs(int d_tilde);

// (|z_1|..|z_dt|) -> k*dt interval-membership bits in [0,1], coordinate
// j's cell i at output j*k + i - 1. Bits are exactly one-hot whenever
// |z_j| is at distance > w from every finite threshold; per coordinate
// they always sum to 1. At most 4*k*dt non-zero weights.
ReluNetwork compile_selector(const BlockPartition& part, double ramp_width);

// bits -> m block indicators B_t = relu(sum_j b_{j,t_j} - (dt-1));
// exactly one-hot on exact selector bits. m*dt weights + m biases.
ReluNetwork compile_onehot(const BlockPartition& part);

// block indicators -> memorized image on the non-spliced coordinates
// (increasing coordinate order). Exact-zero pixels are structural zeros.
ReluNetwork compile_memory(const MemorizingGenerator& gen);

// Full pipeline abs -> selector -> one-hot -> memory plus exact seed
// pass-through to the spliced outputs. The ramp width is chosen so the
// seed-measure of the ambiguous zone is at most delta.
std::pair<ReluNetwork, CompileReport> compile_generator(const MemorizingGenerator& gen,
                                                        double delta);

// Fraction of n random seeds where the compiled forward pass differs
// from the reference generator (exact comparison).
double compiled_disagreement(const MemorizingGenerator& gen, const ReluNetwork& net,
                             std::int64_t n, RandomStream& rng);

}  // namespace memgan
