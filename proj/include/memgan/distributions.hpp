#pragma once

#include <memory>
#include <string>

#include "memgan/io.hpp"
#include "memgan/rng.hpp"
#include "memgan/types.hpp"

namespace memgan {

// Clean image distribution. The synthetic mode draws smooth random cosine
// fields clamped to [-amplitude, amplitude]; the file-backed mode replays
// records from a flat-binary image file.
struct CleanImageModel {
  enum class Mode { synthetic, file_backed };

  int basis_count = 6;
  int frequency_cap = 8;
  double amplitude = 1.0;
  Mode mode = Mode::synthetic;
  std::string file;  // .bin path, file-backed mode only

  CleanImageModel() = default;
  CleanImageModel(int basis_count_, int frequency_cap_, double amplitude_,
                  Mode mode_ = Mode::synthetic, std::string file_ = {});

  std::shared_ptr<ImageFileReader> reader;  // lazily opened for file mode
};

// Spherical Gaussian seed, each coordinate i.i.d. N(0, sigma^2).
SeedVector sample_seed(RandomStream& rng, const DimensionSpec& spec);

ImageVector sample_clean_image(RandomStream& rng, CleanImageModel& model,
                               const DimensionSpec& spec);

// Draws x_tilde ~ clean and z ~ seed independently and splices z into
// x_tilde. The seed is returned alongside the image for test oracles.
std::pair<ImageVector, SeedVector> sample_noised_image(RandomStream& rng,
                                                       CleanImageModel& model,
                                                       const DimensionSpec& spec);

}  // namespace memgan
