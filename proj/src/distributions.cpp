#include "memgan/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "memgan/noise_channel.hpp"

namespace memgan {

CleanImageModel::CleanImageModel(int basis_count_, int frequency_cap_, double amplitude_,
                                 Mode mode_, std::string file_)
    : basis_count(basis_count_),
      frequency_cap(frequency_cap_),
      amplitude(amplitude_),
      mode(mode_),
      file(std::move(file_)) {
  if (basis_count < 0) throw std::invalid_argument("CleanImageModel: basis_count < 0");
  if (frequency_cap < 1) throw std::invalid_argument("CleanImageModel: frequency_cap < 1");
  if (!(amplitude > 0.0)) throw std::invalid_argument("CleanImageModel: amplitude <= 0");
  if (mode == Mode::file_backed && file.empty())
    throw std::invalid_argument("CleanImageModel: file-backed mode needs a path");
}

SeedVector sample_seed(RandomStream& rng, const DimensionSpec& spec) {
  SeedVector z(spec.d_tilde);
  for (double& v : z) v = rng.gaussian(spec.sigma);
  return z;
}

ImageVector sample_clean_image(RandomStream& rng, CleanImageModel& model,
                               const DimensionSpec& spec) {
  if (model.mode == CleanImageModel::Mode::file_backed) {
    if (!model.reader) model.reader = std::make_shared<ImageFileReader>(model.file);
    return model.reader->next(spec.d);
  }
  ImageVector x(spec.d, 0.0);
  const double coef_range = 1.6 * model.amplitude /
                            std::sqrt(std::max(1, model.basis_count));
  const double two_pi = 2.0 * 3.14159265358979323846;
  for (int b = 0; b < model.basis_count; ++b) {
    const double a = rng.uniform(-coef_range, coef_range);
    const double f = 1.0 + static_cast<double>(rng.uniform_int(model.frequency_cap));
    const double phase = rng.uniform(0.0, two_pi);
    for (int i = 0; i < spec.d; ++i) {
      const double t = (i + 0.5) / spec.d;
      x[i] += a * std::cos(two_pi * f * t + phase);
    }
  }
  for (double& v : x) v = std::clamp(v, -model.amplitude, model.amplitude);
  return x;
}

std::pair<ImageVector, SeedVector> sample_noised_image(RandomStream& rng,
                                                       CleanImageModel& model,
                                                       const DimensionSpec& spec) {
  ImageVector x_tilde = sample_clean_image(rng, model, spec);
  SeedVector z = sample_seed(rng, spec);
  return {splice(x_tilde, z, spec), std::move(z)};
}

}  // namespace memgan
