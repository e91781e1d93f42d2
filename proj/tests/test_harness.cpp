#include <doctest.h>

#include <cmath>

#include "memgan/harness.hpp"
#include "memgan/noise_channel.hpp"

using namespace memgan;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.dimension = DimensionSpec(8, 2, 1.0);
  cfg.k = 2;
  cfg.k_grid = {2};
  cfg.hidden_sizes = {8, 4};
  cfg.steps = 5;
  cfg.batch_size = 8;
  cfg.restarts = 1;
  cfg.holdout_size = 100;
  cfg.n_real = 200;
  cfg.n_fake = 200;
  cfg.identity_sets = 100;
  cfg.identity_direct = 200;
  cfg.concentration_trials = 30;
  cfg.concentration_k_grid = {2, 4};
  cfg.finite_sample_k = 2;
  cfg.birthday_k = 2;
  cfg.birthday_samples = 3;
  cfg.birthday_trials = 60;
  cfg.master_seed = 5150;
  return cfg;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config rejects unknown keys and bad values") {
  const ExperimentConfig cfg = tiny_config();
  nlohmann::json j = cfg.to_json();
  CHECK_NOTHROW(ExperimentConfig::from_json(j));

  nlohmann::json top_extra = j;
  top_extra["surprise"] = 1;
  CHECK_THROWS_AS(ExperimentConfig::from_json(top_extra), std::invalid_argument);

  nlohmann::json nested_extra = j;
  nested_extra["training"]["warmup"] = 10;
  CHECK_THROWS_AS(ExperimentConfig::from_json(nested_extra), std::invalid_argument);

  nlohmann::json small_eval = j;
  small_eval["evaluation"]["n_real"] = 50;
  CHECK_THROWS_AS(ExperimentConfig::from_json(small_eval), std::invalid_argument);

  nlohmann::json empty_grid = j;
  empty_grid["partition"]["k_grid"] = nlohmann::json::array();
  CHECK_THROWS_AS(ExperimentConfig::from_json(empty_grid), std::invalid_argument);

  ExperimentConfig starve = cfg;
  starve.finite_sample_factor = 0;  // sets smaller than m
  CHECK_THROWS_AS(starve.validate(), std::invalid_argument);
}

TEST_CASE("config echo is stable") {
  const ExperimentConfig cfg = tiny_config();
  const ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
  CHECK(back.to_json().dump() == cfg.to_json().dump());
}

TEST_CASE("non-colliding sets hold one seed per block") {
  const BlockPartition part = make_partition(3, 2, 1.0);
  RandomStream rng(601);
  for (int rep = 0; rep < 50; ++rep) {
    const NonCollidingSet set = sample_noncolliding(rng, part);
    REQUIRE(set.seeds.size() == 9);
    for (std::size_t i = 0; i < set.seeds.size(); ++i)
      CHECK(block_index(block_tuple(set.seeds[i], part), part) ==
            static_cast<std::int64_t>(i + 1));
  }
}

TEST_CASE("mismatched oracle breaks code transparency") {
  const DimensionSpec spec(8, 2, 1.0);
  CleanImageModel model(5, 3, 1.0);
  const PairOracle mis = make_mismatched_oracle(model, spec);
  RandomStream rng(607);
  int matches = 0;
  for (int i = 0; i < 200; ++i) {
    const auto [x, z] = mis(rng);
    if (encode(x, spec) == z) ++matches;
  }
  CHECK(matches == 0);
}

TEST_CASE("constant discriminator makes both estimators exactly zero") {
  const DimensionSpec spec(8, 2, 1.0);
  const BlockPartition part = make_partition(4, 2, 1.0);
  CleanImageModel model(5, 3, 1.0);
  RandomStream gen_rng(613);
  CleanImageModel m = model;
  const MemorizingGenerator gen = build_generator(gen_rng, part, m, spec);
  const Discriminator zero({10, 4, 1}, 1.0);
  RandomStream rng(617);
  const IdentityCheck chk =
      check_noncolliding_identity(zero, gen, 100, 200, rng, MeasuringFunction{1.0});
  CHECK(chk.stratified_mean == 0.0);
  CHECK(chk.direct_mean == 0.0);
  CHECK(chk.z_score == 0.0);
}

TEST_CASE("stratified and direct estimators agree for a random discriminator") {
  const DimensionSpec spec(8, 2, 1.0);
  const BlockPartition part = make_partition(4, 2, 1.0);  // m = 16
  CleanImageModel model(5, 3, 1.0);
  RandomStream gen_rng(619);
  CleanImageModel m = model;
  const MemorizingGenerator gen = build_generator(gen_rng, part, m, spec);
  Discriminator d({10, 12, 1}, 1.0);
  RandomStream init(631);
  d.init_params(init, 0.4);
  RandomStream rng(641);
  const IdentityCheck chk =
      check_noncolliding_identity(d, gen, 500, 8000, rng, MeasuringFunction{1.0});
  CHECK(chk.z_score <= 3.0);
}

TEST_CASE("identical generator draws give zero spread") {
  const DimensionSpec spec(8, 2, 1.0);
  const BlockPartition part = make_partition(4, 2, 1.0);
  CleanImageModel model(5, 3, 1.0);
  Discriminator d({10, 8, 1}, 1.0);
  RandomStream init(643);
  d.init_params(init, 0.3);
  const MeasuringFunction mf{1.0};

  auto stratified_mean = [&](std::uint64_t seed) {
    RandomStream gr(seed);
    CleanImageModel mm = model;
    const MemorizingGenerator gen = build_generator(gr, part, mm, spec);
    RandomStream sr(seed + 1);
    const NonCollidingSet set = sample_noncolliding(sr, part);
    double mean = 0.0;
    for (const auto& z : set.seeds) mean += phi(d.forward(generate(gen, z), z), mf);
    return mean / set.seeds.size();
  };
  CHECK(stratified_mean(911) == stratified_mean(911));
  CHECK(stratified_mean(911) != stratified_mean(912));
}

TEST_CASE("birthday frequencies at the edges") {
  const DimensionSpec spec(8, 2, 1.0);
  const BlockPartition part = make_partition(2, 2, 1.0);  // m = 4
  CleanImageModel model(5, 3, 1.0);
  RandomStream gen_rng(647);
  CleanImageModel m = model;
  const MemorizingGenerator gen = build_generator(gen_rng, part, m, spec);

  RandomStream rng(653);
  CHECK(run_birthday_trials(gen, 10, 50, rng) == 1.0);  // s > m, pigeonhole
  CHECK_THROWS(run_birthday_trials(gen, 1, 50, rng));

  const BlockPartition part16 = make_partition(4, 2, 1.0);  // m = 16
  RandomStream gen_rng2(659);
  CleanImageModel m2 = model;
  const MemorizingGenerator gen16 = build_generator(gen_rng2, part16, m2, spec);
  RandomStream rng2(661);
  const double freq = run_birthday_trials(gen16, 2, 400, rng2);
  const double expect = 1.0 / 16.0;
  const double sigma = std::sqrt(expect * (1 - expect) / 400.0);
  CHECK(std::abs(freq - expect) <= 3.0 * sigma);
}

TEST_CASE("experiment reports are byte-identical across reruns and thread counts") {
  ExperimentConfig cfg = tiny_config();
  cfg.threads = 1;
  const std::string a = run_collapse_experiment(cfg).json.dump();
  const std::string b = run_collapse_experiment(cfg).json.dump();
  CHECK(a == b);
  cfg.threads = 2;
  // thread count is not part of the result, only of the schedule; strip the
  // config echo which records it
  auto strip = [](nlohmann::json j) {
    j["config"].erase("threads");
    return j.dump();
  };
  ExperimentConfig cfg1 = tiny_config();
  cfg1.threads = 1;
  CHECK(strip(run_birthday_experiment(cfg).json) == strip(run_birthday_experiment(cfg1).json));
}

TEST_CASE("collapse cells report the joint triple") {
  const ExperimentConfig cfg = tiny_config();
  const ExperimentReport rep = run_collapse_experiment(cfg);
  REQUIRE(rep.json.at("cells").size() == 1);
  const auto& cell = rep.json.at("cells").at(0);
  REQUIRE(!cell.contains("error"));
  CHECK(cell.at("m").get<int>() == 4);
  CHECK(cell.at("support_census").get<int>() <= 4);
  CHECK(cell.at("encoder_nonzero_weights").get<int>() == 2);
  CHECK(cell.at("compiled_nonzero_weights").get<std::size_t>() <=
        cell.at("compiled_predicted_bound").get<std::size_t>());
  CHECK(rep.json.at("schema_version").get<int>() == 1);
}

}  // TEST_SUITE
