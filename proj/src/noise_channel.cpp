#include "memgan/noise_channel.hpp"

namespace memgan {

std::vector<int> spliced_positions(const DimensionSpec& spec) {
  std::vector<int> pos(spec.d_tilde);
  const int step = spec.spacing();
  for (int j = 0; j < spec.d_tilde; ++j) pos[j] = (j + 1) * step;
  return pos;
}

ImageVector splice(const ImageVector& x_tilde, const SeedVector& z,
                   const DimensionSpec& spec) {
  require_dim(x_tilde, spec.d, "splice: x_tilde");
  require_dim(z, spec.d_tilde, "splice: z");
  ImageVector x = x_tilde;
  const int step = spec.spacing();
  for (int j = 0; j < spec.d_tilde; ++j) x[(j + 1) * step - 1] = z[j];
  return x;
}

SeedVector encode(const ImageVector& x, const DimensionSpec& spec) {
  require_dim(x, spec.d, "encode: x");
  SeedVector z(spec.d_tilde);
  const int step = spec.spacing();
  for (int j = 0; j < spec.d_tilde; ++j) z[j] = x[(j + 1) * step - 1];
  return z;
}

ReluNetwork encoder_as_network(const DimensionSpec& spec) {
  std::vector<Triplet> trips;
  const int step = spec.spacing();
  for (int j = 0; j < spec.d_tilde; ++j)
    trips.push_back({j, (j + 1) * step - 1, 1.0});
  SparseLayer layer(spec.d_tilde, spec.d, std::move(trips),
                    std::vector<double>(spec.d_tilde, 0.0), Activation::identity);
  return ReluNetwork(spec.d, {std::move(layer)});
}

}  // namespace memgan
