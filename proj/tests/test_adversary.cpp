#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "memgan/adversary.hpp"
#include "memgan/harness.hpp"

using namespace memgan;

namespace {

double batch_objective(const Discriminator& disc, const std::vector<BatchEntry>& batch,
                       const MeasuringFunction& mf) {
  double real = 0.0, fake = 0.0;
  std::int64_t n_r = 0, n_f = 0;
  for (const auto& e : batch) (e.real ? n_r : n_f)++;
  for (const auto& e : batch) {
    const double v = phi(disc.forward(e.input), mf);
    if (e.real)
      real += v / n_r;
    else
      fake += v / n_f;
  }
  return real - fake;
}

std::vector<BatchEntry> random_batch(RandomStream& rng, int input_dim, int n) {
  std::vector<BatchEntry> batch(n);
  for (int i = 0; i < n; ++i) {
    batch[i].input.resize(input_dim);
    for (double& v : batch[i].input) v = rng.gaussian(1.0);
    batch[i].real = i % 2 == 0;
  }
  return batch;
}

}  // namespace

TEST_SUITE("adversary") {

TEST_CASE("phi is a bounded odd squash") {
  const MeasuringFunction mf{2.0};
  CHECK(phi(0.0, mf) == 0.0);
  CHECK(std::abs(phi(50.0, mf)) > 0.999 * 2.0);
  CHECK(std::abs(phi(-50.0, mf)) > 0.999 * 2.0);
  CHECK(std::abs(phi(1e6, mf)) < 2.0 + 1e-15);
  CHECK(phi_derivative(0.0, mf) == 2.0);
  for (double t : {-2.0, 0.5, 3.0}) {
    const double h = 1e-6;
    const double fd = (phi(t + h, mf) - phi(t - h, mf)) / (2 * h);
    CHECK(std::abs(fd - phi_derivative(t, mf)) < 1e-8);
  }
}

TEST_CASE("forward on a hand-computed 2-2-1 net") {
  Discriminator d({2, 2, 1}, 1.0);
  d.layers()[0].w = {0.3, -0.2, 0.5, 0.1};
  d.layers()[0].b = {0.1, -0.3};
  d.layers()[1].w = {0.7, -0.4};
  d.layers()[1].b = {0.2};
  const double h1 = std::max(0.0, 0.3 * 1.0 - 0.2 * 2.0 + 0.1);
  const double h2 = std::max(0.0, 0.5 * 1.0 + 0.1 * 2.0 - 0.3);
  const double manual = 0.7 * h1 - 0.4 * h2 + 0.2;
  CHECK(std::abs(d.forward({1.0, 2.0}) - manual) < 1e-12);
}

TEST_CASE("zero parameters score zero, output layer is linear") {
  Discriminator d({4, 8, 1}, 1.0);
  RandomStream rng(71);
  CHECK(d.forward(std::vector<double>(4, 1.5)) == 0.0);

  d.init_params(rng, 0.3);
  const std::vector<double> in{0.2, -1.0, 0.4, 2.0};
  const double base = d.forward(in);
  for (double& w : d.layers().back().w) w *= 3.0;
  d.layers().back().b[0] *= 3.0;
  CHECK(d.forward(in) == doctest::Approx(3.0 * base).epsilon(1e-12));
}

TEST_CASE("capacity counts every scalar parameter") {
  const Discriminator d({36, 48, 32, 1}, 1.0);
  CHECK(d.capacity() == 36 * 48 + 48 + 48 * 32 + 32 + 32 + 1);
  CHECK(d.capacity() == static_cast<std::int64_t>(d.flatten().size()));
}

TEST_CASE("reverse-mode gradients match central finite differences") {
  const MeasuringFunction mf{1.0};
  RandomStream rng(73);
  const int trials = 100;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Discriminator d({4, 6, 5, 1}, 1.0);
    d.init_params(rng, 0.5);
    const std::vector<BatchEntry> batch = random_batch(rng, 4, 6);

    const std::vector<double> grad = disc_gradient(d, batch, mf);
    std::vector<double> theta = d.flatten();
    const double h = 1e-5;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      Discriminator probe = d;
      std::vector<double> t = theta;
      t[i] = theta[i] + h;
      probe.unflatten(t);
      const double up = batch_objective(probe, batch, mf);
      t[i] = theta[i] - h;
      probe.unflatten(t);
      const double dn = batch_objective(probe, batch, mf);
      const double fd = (up - dn) / (2 * h);
      const double rel = std::abs(grad[i] - fd) / std::max({1.0, std::abs(fd), std::abs(grad[i])});
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("identical real and fake batches cancel") {
  const MeasuringFunction mf{1.0};
  RandomStream rng(79);
  Discriminator d({3, 5, 1}, 1.0);
  d.init_params(rng, 0.4);
  // each entry appears on both sides, adjacent so the contributions
  // cancel exactly in the accumulator
  std::vector<BatchEntry> batch;
  for (const auto& e : random_batch(rng, 3, 4)) {
    BatchEntry real = e, fake = e;
    real.real = true;
    fake.real = false;
    batch.push_back(real);
    batch.push_back(fake);
  }
  for (double g : disc_gradient(d, batch, mf)) CHECK(g == 0.0);
}

TEST_CASE("gradient of an all-zero net is finite") {
  const MeasuringFunction mf{1.0};
  Discriminator d({3, 5, 1}, 1.0);
  RandomStream rng(83);
  for (double g : disc_gradient(d, random_batch(rng, 3, 4), mf))
    CHECK(std::isfinite(g));
}

TEST_CASE("objective on matched oracles stays at noise level") {
  // the fooling property needs m large: the finite-support bias of the
  // fake side scales like 1/sqrt(m)
  const DimensionSpec spec(12, 4, 1.0);
  const BlockPartition part = make_partition(8, 4, 1.0);  // m = 4096
  CleanImageModel model(5, 4, 1.0);
  RandomStream gen_rng(89);
  CleanImageModel m = model;
  const MemorizingGenerator gen = build_generator(gen_rng, part, m, spec);
  const PairOracle real = make_real_oracle(model, spec);
  const PairOracle fake = make_fake_oracle(gen);
  const MeasuringFunction mf{1.0};

  Discriminator zero({16, 8, 1}, 1.0);
  RandomStream eval_rng(97);
  CHECK(bigan_objective(zero, real, fake, 100, 100, eval_rng, mf).gap == 0.0);

  RandomStream init_rng(101);
  int outliers = 0;
  for (int i = 0; i < 10; ++i) {
    Discriminator d({16, 16, 8, 1}, 1.0);
    d.init_params(init_rng, 0.3);
    const ObjectiveEstimate est = bigan_objective(d, real, fake, 10000, 10000, eval_rng, mf);
    CHECK(est.real_term >= -1.0);
    CHECK(est.real_term <= 1.0);
    CHECK(est.fake_term >= -1.0);
    CHECK(est.fake_term <= 1.0);
    if (est.gap > 5.0 * est.std_err) ++outliers;
  }
  CHECK(outliers == 0);
}

TEST_CASE("swapping the sample sets negates the difference") {
  const MeasuringFunction mf{1.0};
  RandomStream rng(103);
  Discriminator d({4, 6, 1}, 1.0);
  d.init_params(rng, 0.4);

  std::vector<std::vector<double>> A, B;
  for (int i = 0; i < 50; ++i) {
    A.emplace_back(4);
    B.emplace_back(4);
    for (double& v : A.back()) v = rng.gaussian(1.0);
    for (double& v : B.back()) v = rng.gaussian(1.0);
  }
  auto term = [&](const std::vector<std::vector<double>>& set) {
    double s = 0.0;
    for (const auto& in : set) s += phi(d.forward(in), mf) / set.size();
    return s;
  };
  const double forward_diff = term(A) - term(B);
  const double swapped_diff = term(B) - term(A);
  CHECK(forward_diff == -swapped_diff);
  CHECK(std::abs(forward_diff) == std::abs(swapped_diff));
}

TEST_CASE("steps=0 returns an initialized, unbiased discriminator") {
  const DimensionSpec spec(12, 4, 1.0);
  const BlockPartition part = make_partition(8, 4, 1.0);  // m = 4096
  CleanImageModel model(5, 3, 1.0);
  RandomStream gen_rng(107);
  CleanImageModel m = model;
  const MemorizingGenerator gen = build_generator(gen_rng, part, m, spec);
  const PairOracle real = make_real_oracle(model, spec);
  const PairOracle fake = make_fake_oracle(gen);
  const MeasuringFunction mf{1.0};

  TrainConfig tc;
  tc.steps = 0;
  tc.restarts = 2;
  tc.holdout_size = 500;
  tc.hidden_sizes = {8, 4};
  const TrainResult tr = train_discriminator(RandomStream(109), real, fake, 16, tc, mf);
  RandomStream eval_rng(113);
  const ObjectiveEstimate est = bigan_objective(tr.best, real, fake, 4000, 4000, eval_rng, mf);
  CHECK(est.gap <= 3.0 * est.std_err);
}

TEST_CASE("training separates mismatched codes") {
  const DimensionSpec spec(8, 2, 1.0);
  CleanImageModel model(5, 3, 1.0);
  const PairOracle real = make_real_oracle(model, spec);
  const PairOracle fake = make_mismatched_oracle(model, spec);
  const MeasuringFunction mf{1.0};

  TrainConfig tc;
  tc.steps = 600;
  tc.learning_rate = 0.1;
  tc.batch_size = 32;
  tc.restarts = 2;
  tc.holdout_size = 1000;
  tc.hidden_sizes = {16, 8};
  const TrainResult tr = train_discriminator(RandomStream(127), real, fake, 10, tc, mf);
  CHECK(tr.holdout.gap >= 0.3);
  CHECK(tr.trace.size() == 600);

  // clip contract after training
  for (double p : tr.best.flatten()) CHECK(std::abs(p) <= 1.0);
}

TEST_CASE("doubling restarts never loses the best run") {
  const DimensionSpec spec(8, 2, 1.0);
  const BlockPartition part = make_partition(2, 2, 1.0);
  CleanImageModel model(5, 3, 1.0);
  RandomStream gen_rng(131);
  CleanImageModel m = model;
  const MemorizingGenerator gen = build_generator(gen_rng, part, m, spec);
  const PairOracle real = make_real_oracle(model, spec);
  const PairOracle fake = make_fake_oracle(gen);
  const MeasuringFunction mf{1.0};

  TrainConfig tc;
  tc.steps = 40;
  tc.restarts = 1;
  tc.holdout_size = 200;
  tc.hidden_sizes = {8};
  const RandomStream root(137);
  const double gap1 = train_discriminator(root, real, fake, 10, tc, mf).holdout.gap;
  tc.restarts = 2;
  const double gap2 = train_discriminator(root, real, fake, 10, tc, mf).holdout.gap;
  tc.restarts = 4;
  const double gap4 = train_discriminator(root, real, fake, 10, tc, mf).holdout.gap;
  CHECK(gap2 >= gap1);
  CHECK(gap4 >= gap2);
}

TEST_CASE("lipschitz probe stays under the analytic bound") {
  RandomStream rng(139);
  Discriminator d({5, 12, 6, 1}, 1.0);
  d.init_params(rng, 0.5);
  CHECK_THROWS(lipschitz_probe(d, 10, 0.0, rng));

  RandomStream probe_rng(149);
  const LipschitzProbe p = lipschitz_probe(d, 200, 1e-3, probe_rng);
  CHECK(p.max_ratio > 0.0);
  CHECK(p.max_ratio <= p.analytic_bound);
}

TEST_CASE("probe ratio of a linear scorer is scale free") {
  RandomStream rng(151);
  Discriminator d({6, 1}, 1.0);
  d.init_params(rng, 0.5);
  RandomStream r1(157), r2(157);
  const LipschitzProbe big = lipschitz_probe(d, 50, 1e-2, r1);
  const LipschitzProbe small = lipschitz_probe(d, 50, 1e-6, r2);
  // identical draws, linear response: the ratio does not depend on the scale
  CHECK(std::abs(big.max_ratio - small.max_ratio) < 1e-6 * std::max(1.0, big.max_ratio));
  CHECK(big.max_ratio <= big.analytic_bound);
}

TEST_CASE("checkpoint json round trip") {
  RandomStream rng(163);
  Discriminator d({5, 7, 1}, 0.8);
  d.init_params(rng, 0.4);
  const Discriminator back = Discriminator::from_json(d.to_json());
  CHECK(back.flatten() == d.flatten());
  CHECK(back.weight_clip() == d.weight_clip());
  const std::vector<double> in{0.1, -0.5, 2.0, 0.7, -1.1};
  CHECK(back.forward(in) == d.forward(in));
}

}  // TEST_SUITE
