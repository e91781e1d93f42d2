#include "memgan/generator.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "memgan/noise_channel.hpp"

namespace memgan {

void TheoremBudget::validate() const {
  if (p < 1) throw std::invalid_argument("TheoremBudget: p must be >= 1");
  if (!(delta >= 1.0)) throw std::invalid_argument("TheoremBudget: delta must be >= 1");
  if (!(lipschitz > 0.0) || !(phi_lipschitz > 0.0))
    throw std::invalid_argument("TheoremBudget: Lipschitz constants must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("TheoremBudget: epsilon must be positive");
}

std::int64_t theorem_support_size(const TheoremBudget& budget) {
  budget.validate();
  const double lg = std::log(static_cast<double>(budget.p) * budget.delta *
                             budget.lipschitz * budget.phi_lipschitz / budget.epsilon);
  const double val = static_cast<double>(budget.p) * budget.delta * budget.delta * lg * lg /
                     (budget.epsilon * budget.epsilon);
  if (!std::isfinite(val) || val > 9.0e18)
    throw std::overflow_error("theorem_support_size: formula overflows 64-bit support");
  const auto m = static_cast<std::int64_t>(std::ceil(val));
  return m < 1 ? 1 : m;
}

int smallest_k_for_support(std::int64_t m_target, int d_tilde) {
  if (m_target < 1) throw std::invalid_argument("smallest_k_for_support: m_target < 1");
  if (d_tilde < 1) throw std::invalid_argument("smallest_k_for_support: d_tilde < 1");
  int k = static_cast<int>(std::floor(
      std::pow(static_cast<double>(m_target), 1.0 / d_tilde)));
  if (k < 1) k = 1;
  // pow is inexact; walk to the exact boundary
  auto power_at_least = [&](int kk) {
    std::int64_t v = 1;
    for (int j = 0; j < d_tilde; ++j) {
      if (v > m_target / kk + 1) return true;
      v *= kk;
    }
    return v >= m_target;
  };
  while (k > 1 && power_at_least(k - 1)) --k;
  while (!power_at_least(k)) ++k;
  return k;
}

void MemorizingGenerator::validate() const {
  if (partition.d_tilde != spec.d_tilde)
    throw std::invalid_argument("MemorizingGenerator: partition/spec d_tilde mismatch");
  if (partition.sigma != spec.sigma)
    throw std::invalid_argument("MemorizingGenerator: partition/spec sigma mismatch");
  if (static_cast<std::int64_t>(memorized.size()) != partition.m)
    throw std::invalid_argument("MemorizingGenerator: need exactly m memorized images");
  for (const auto& img : memorized)
    if (static_cast<int>(img.size()) != spec.d)
      throw std::invalid_argument("MemorizingGenerator: memorized image has wrong dimension");
}

MemorizingGenerator build_generator(RandomStream& rng, const BlockPartition& partition,
                                    CleanImageModel& image_model, const DimensionSpec& spec) {
  MemorizingGenerator gen;
  gen.partition = partition;
  gen.spec = spec;
  gen.memorized.reserve(partition.m);
  for (std::int64_t t = 0; t < partition.m; ++t)
    gen.memorized.push_back(sample_clean_image(rng, image_model, spec));
  gen.validate();
  return gen;
}

ImageVector generate(const MemorizingGenerator& gen, const SeedVector& z) {
  const std::int64_t ind = block_index(block_tuple(z, gen.partition), gen.partition);
  return splice(gen.memorized[ind - 1], z, gen.spec);
}

std::int64_t support_census(const MemorizingGenerator& gen, std::int64_t n_samples,
                            RandomStream& rng) {
  if (n_samples < 1) throw std::invalid_argument("support_census: n_samples < 1");
  const std::vector<int> pos = spliced_positions(gen.spec);
  std::unordered_set<std::string> patterns;
  std::string key;
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const SeedVector z = sample_seed(rng, gen.spec);
    const ImageVector x = generate(gen, z);
    key.clear();
    key.resize((gen.spec.d - gen.spec.d_tilde) * sizeof(double));
    std::size_t off = 0;
    int next_spliced = 0;
    for (int c = 0; c < gen.spec.d; ++c) {
      if (next_spliced < gen.spec.d_tilde && c + 1 == pos[next_spliced]) {
        ++next_spliced;
        continue;
      }
      std::memcpy(key.data() + off, &x[c], sizeof(double));
      off += sizeof(double);
    }
    patterns.insert(key);
  }
  return static_cast<std::int64_t>(patterns.size());
}

void save_generator(const MemorizingGenerator& gen, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_json(dir / "partition.json", gen.partition.to_json());
  write_image_file(dir / "images.bin", gen.memorized, gen.spec.d);
}

MemorizingGenerator load_generator(const std::filesystem::path& dir,
                                   std::int64_t max_support) {
  MemorizingGenerator gen;
  gen.partition = BlockPartition::from_json(load_json(dir / "partition.json"), max_support);
  gen.memorized = read_image_file(dir / "images.bin");
  if (gen.memorized.empty())
    throw std::runtime_error("load_generator: no memorized images");
  gen.spec = DimensionSpec(static_cast<int>(gen.memorized.front().size()),
                           gen.partition.d_tilde, gen.partition.sigma);
  gen.validate();
  return gen;
}

}  // namespace memgan
