#include <doctest.h>

#include <cmath>

#include "memgan/compiler.hpp"
#include "memgan/noise_channel.hpp"

using namespace memgan;

namespace {

MemorizingGenerator small_generator(int k, int d_tilde, int d, std::uint64_t seed,
                                    double sigma = 1.0) {
  const DimensionSpec spec(d, d_tilde, sigma);
  const BlockPartition part = make_partition(k, d_tilde, sigma);
  CleanImageModel model(5, 3, 1.0);
  RandomStream rng(seed);
  return build_generator(rng, part, model, spec);
}

}  // namespace

TEST_SUITE("relu-compiler") {

TEST_CASE("forward of identity and single relu unit") {
  SparseLayer id(3, 3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}},
                 std::vector<double>(3, 0.0), Activation::identity);
  const ReluNetwork net(3, {id});
  CHECK(net.forward({1.5, -2.0, 0.25}) == std::vector<double>{1.5, -2.0, 0.25});

  SparseLayer unit(1, 1, {{0, 0, 1.0}}, {0.0}, Activation::relu);
  const ReluNetwork relu(1, {unit});
  CHECK(relu.forward({-5.0}) == std::vector<double>{0.0});
  CHECK(relu.forward({3.0}) == std::vector<double>{3.0});
}

TEST_CASE("abs gadget") {
  const ReluNetwork net = compile_abs(2);
  CHECK(net.nonzero_weights() == 8);
  CHECK(net.forward({-3.0, 0.0}) == std::vector<double>{3.0, 0.0});
  CHECK(net.forward({2.5, -0.5}) == std::vector<double>{2.5, 0.5});
  RandomStream rng(301);
  for (int i = 0; i < 10000; ++i) {
    const double a = rng.gaussian(2.0), b = rng.gaussian(2.0);
    CHECK(net.forward({a, b}) == std::vector<double>{std::abs(a), std::abs(b)});
  }
}

TEST_CASE("empty and encoder counts") {
  CHECK(ReluNetwork(4, {}).nonzero_weights() == 0);
  CHECK(encoder_as_network(DimensionSpec(6, 2, 1.0)).nonzero_weights() == 2);
}

TEST_CASE("duplicate triplets are rejected") {
  CHECK_THROWS(SparseLayer(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}}, {0.0, 0.0},
                           Activation::identity));
}

TEST_CASE("selector emits exact one-hots away from thresholds") {
  const BlockPartition part = make_partition(2, 1, 1.0);
  const ReluNetwork sel = compile_selector(part, 0.01);
  CHECK(sel.nonzero_weights() <= 4u * 2 * 1);
  CHECK(sel.forward({0.1}) == std::vector<double>{1.0, 0.0});
  CHECK(sel.forward({2.0}) == std::vector<double>{0.0, 1.0});
}

TEST_CASE("selector bits always sum to one") {
  const BlockPartition part = make_partition(5, 2, 1.0);
  const double w = 0.02;
  const ReluNetwork sel = compile_selector(part, w);
  CHECK(sel.nonzero_weights() <= 4u * 5 * 2);
  RandomStream rng(307);
  auto check_sum = [&](const std::vector<double>& abs_z) {
    const std::vector<double> bits = sel.forward(abs_z);
    for (int j = 0; j < 2; ++j) {
      double sum = 0.0;
      for (int i = 0; i < 5; ++i) sum += bits[j * 5 + i];
      CHECK(sum == 1.0);
    }
  };
  for (int i = 0; i < 20000; ++i)
    check_sum({std::abs(rng.gaussian(1.0)), std::abs(rng.gaussian(1.0))});
  // on and near the thresholds too
  for (double tau : part.thresholds) {
    check_sum({tau, tau + w / 2});
    check_sum({tau - w / 2, tau + 1e-14});
  }
}

TEST_CASE("fractional bits appear only inside the ramp zone") {
  const BlockPartition part = make_partition(2, 1, 1.0);
  const double w = 0.01;
  const ReluNetwork sel = compile_selector(part, w);
  const double tau = part.thresholds[0];
  const std::vector<double> inside = sel.forward({tau - w / 2});
  CHECK(inside[0] > 0.0);
  CHECK(inside[0] < 1.0);
  CHECK(inside[0] + inside[1] == 1.0);
  const std::vector<double> above = sel.forward({tau + w});
  CHECK(above == std::vector<double>{0.0, 1.0});
}

TEST_CASE("selector rejects bad widths") {
  const BlockPartition part = make_partition(4, 2, 1.0);
  CHECK_THROWS(compile_selector(part, 0.0));
  CHECK_THROWS(compile_selector(part, 10.0));
}

TEST_CASE("one-hot block indicators") {
  const BlockPartition part = make_partition(2, 2, 1.0);
  const ReluNetwork oh = compile_onehot(part);
  CHECK(oh.nonzero_weights() == 4u * 2);  // m * d_tilde
  // exact bits for tuple (1,2): coordinate 0 cell 1, coordinate 1 cell 2
  const std::vector<double> B = oh.forward({1.0, 0.0, 0.0, 1.0});
  CHECK(B == std::vector<double>{0.0, 0.0, 1.0, 0.0});  // block index 3

  // all-exact inputs give a single active block
  for (int t1 = 1; t1 <= 2; ++t1)
    for (int t2 = 1; t2 <= 2; ++t2) {
      std::vector<double> bits(4, 0.0);
      bits[t1 - 1] = 1.0;
      bits[2 + t2 - 1] = 1.0;
      const std::vector<double> out = oh.forward(bits);
      double sum = 0.0;
      for (double v : out) sum += v;
      CHECK(sum == 1.0);
      CHECK(out[block_index({t1, t2}, part) - 1] == 1.0);
    }

  // a fractional bit degrades the affected block
  const std::vector<double> degraded = oh.forward({0.5, 0.5, 0.0, 1.0});
  CHECK(degraded[2] <= 0.5);
  CHECK(degraded[3] <= 0.5);
}

TEST_CASE("memory bank selects the memorized image") {
  const MemorizingGenerator gen = small_generator(2, 2, 6, 401);
  const ReluNetwork mem = compile_memory(gen);
  CHECK(mem.nonzero_weights() <= 4u * (6 - 2));

  std::vector<double> B(4, 0.0);
  B[2] = 1.0;
  const std::vector<double> out = mem.forward(B);
  const std::vector<int> pos = spliced_positions(gen.spec);
  int row = 0, next = 0;
  for (int c = 0; c < 6; ++c) {
    if (next < 2 && c + 1 == pos[next]) {
      ++next;
      continue;
    }
    CHECK(out[row] == gen.memorized[2][c]);
    ++row;
  }
  CHECK(mem.forward(std::vector<double>(4, 0.0)) == std::vector<double>(4, 0.0));
}

TEST_CASE("memory bank stores exact zeros structurally") {
  MemorizingGenerator gen = small_generator(2, 2, 12, 403);
  std::size_t zeroed = 0;
  for (auto& img : gen.memorized) {
    img[0] = 0.0;  // non-spliced coordinate
    ++zeroed;
  }
  const ReluNetwork mem = compile_memory(gen);
  CHECK(mem.nonzero_weights() == 4u * (12 - 2) - zeroed);
}

TEST_CASE("compiled generator agrees with the reference off the ramp zones") {
  for (const double delta : {0.05, 0.01}) {
    const MemorizingGenerator gen = small_generator(4, 2, 12, 407);
    const auto [net, report] = compile_generator(gen, delta);
    CHECK(report.nonzero_weights == net.nonzero_weights());
    CHECK(report.nonzero_weights <= report.predicted_bound);
    RandomStream rng(409);
    CHECK(compiled_disagreement(gen, net, 20000, rng) <= delta);
  }
}

TEST_CASE("compiled pass-through keeps the code exact") {
  const MemorizingGenerator gen = small_generator(3, 2, 8, 419);
  const auto [net, report] = compile_generator(gen, 0.05);
  RandomStream rng(421);
  for (int i = 0; i < 5000; ++i) {
    const SeedVector z = sample_seed(rng, gen.spec);
    CHECK(encode(net.forward(z), gen.spec) == z);
  }
}

TEST_CASE("weight budget bound and its 2md envelope") {
  for (int k : {2, 3, 4}) {
    for (int dt : {2, 3}) {
      const int d = 16;
      const MemorizingGenerator gen = small_generator(k, dt, d, 431 + k + dt);
      const auto [net, report] = compile_generator(gen, 0.02);
      CHECK(report.nonzero_weights <= report.predicted_bound);
      const auto m = static_cast<std::size_t>(gen.partition.m);
      if (d >= 2 * (dt + 1) && m >= static_cast<std::size_t>(4 * k))
        CHECK(report.predicted_bound <= 2 * m * d);
    }
  }
}

TEST_CASE("compile rejects bad deltas") {
  const MemorizingGenerator gen = small_generator(2, 2, 6, 433);
  CHECK_THROWS_AS(compile_generator(gen, 0.0).first, std::invalid_argument);
  CHECK_THROWS_AS(compile_generator(gen, 1.0).first, std::invalid_argument);
  CHECK_THROWS_AS(compile_generator(gen, 1e-12).first, std::runtime_error);
}

TEST_CASE("network json round trip is bitwise") {
  const MemorizingGenerator gen = small_generator(3, 2, 10, 439);
  const auto [net, report] = compile_generator(gen, 0.03);
  const ReluNetwork back = ReluNetwork::from_json(net.to_json());
  CHECK(back.nonzero_weights() == net.nonzero_weights());
  RandomStream rng(443);
  for (int i = 0; i < 2000; ++i) {
    const SeedVector z = sample_seed(rng, gen.spec);
    CHECK(back.forward(z) == net.forward(z));
  }
  // serialized text round trips to the identical document
  CHECK(ReluNetwork::from_json(net.to_json()).to_json().dump() == net.to_json().dump());
}

TEST_CASE("k=1 compiles to a constant memory with pass-through") {
  const MemorizingGenerator gen = small_generator(1, 2, 6, 449);
  const auto [net, report] = compile_generator(gen, 0.5);
  RandomStream rng(451);
  for (int i = 0; i < 2000; ++i) {
    const SeedVector z = sample_seed(rng, gen.spec);
    CHECK(net.forward(z) == generate(gen, z));
  }
  CHECK(report.nonzero_weights <= report.predicted_bound);
}

}  // TEST_SUITE
