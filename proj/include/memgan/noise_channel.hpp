#pragma once

#include <vector>

#include "memgan/relu.hpp"
#include "memgan/types.hpp"

namespace memgan {

// The d_tilde spliced positions j*floor(d/d_tilde), j = 1..d_tilde,
// 1-based throughout this interface.
std::vector<int> spliced_positions(const DimensionSpec& spec);

// x_tilde with the spliced positions overwritten by z.
ImageVector splice(const ImageVector& x_tilde, const SeedVector& z,
                   const DimensionSpec& spec);

// Extracts the noise: the spliced coordinates of x, in order. Exact
// inverse of splice on those coordinates, bitwise.
SeedVector encode(const ImageVector& x, const DimensionSpec& spec);

// One linear layer with exactly d_tilde weights of value 1; forward pass
// equals encode on all inputs.
ReluNetwork encoder_as_network(const DimensionSpec& spec);

}  // namespace memgan
