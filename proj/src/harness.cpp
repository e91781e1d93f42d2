#include "memgan/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "memgan/noise_channel.hpp"
#include "memgan/parallel.hpp"

namespace memgan {

namespace {

// Strict JSON section reader: every present key must be consumed.
class Section {
 public:
  Section(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw std::invalid_argument("config: " + path_ + " must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (j_.contains(key)) out = j_.at(key).get<T>();
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const nlohmann::json& raw(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key()))
        throw std::invalid_argument("config: unknown key \"" + path_ + item.key() + "\"");
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

struct Welford {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
  double var() const { return n > 1 ? m2 / (n - 1) : 0.0; }
  double std_err() const { return n > 1 ? std::sqrt(var() / n) : 0.0; }
  double stddev() const { return std::sqrt(var()); }
};

std::string nonspliced_key(const ImageVector& x, const std::vector<int>& pos, int d_tilde) {
  std::string key((x.size() - d_tilde) * sizeof(double), '\0');
  std::size_t off = 0;
  int next = 0;
  for (int c = 0; c < static_cast<int>(x.size()); ++c) {
    if (next < d_tilde && c + 1 == pos[next]) {
      ++next;
      continue;
    }
    std::memcpy(key.data() + off, &x[c], sizeof(double));
    off += sizeof(double);
  }
  return key;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (k_grid.empty() || concentration_k_grid.empty())
    throw std::invalid_argument("config: k grids must be non-empty");
  for (int kk : k_grid)
    if (kk < 1) throw std::invalid_argument("config: k values must be >= 1");
  if (n_real < 100 || n_fake < 100)
    throw std::invalid_argument("config: evaluation sizes must be >= 100");
  if (hidden_sizes.empty())
    throw std::invalid_argument("config: discriminator needs at least one hidden layer");
  if (steps < 0 || restarts < 1 || batch_size < 1 || holdout_size < 2)
    throw std::invalid_argument("config: bad training parameters");
  if (!(phi_delta >= 1.0)) throw std::invalid_argument("config: objective delta must be >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be positive");
  if (!(compile_delta > 0.0) || !(compile_delta < 1.0))
    throw std::invalid_argument("config: compile delta must lie in (0, 1)");
  if (identity_sets < 100 || identity_direct < 100)
    throw std::invalid_argument("config: identity check sizes must be >= 100");
  if (finite_sample_factor < 1)
    throw std::invalid_argument("config: finite-sample sets must hold at least m points");
  if (birthday_samples < 2) throw std::invalid_argument("config: birthday needs s >= 2");
  if (birthday_trials < 1) throw std::invalid_argument("config: birthday needs trials >= 1");
  if (concentration_trials < 30)
    throw std::invalid_argument("config: concentration needs at least 30 trials");
  if (image_mode != "synthetic" && image_mode != "file")
    throw std::invalid_argument("config: image mode must be synthetic or file");
  (void)image_model();  // CleanImageModel performs its own checks
}

CleanImageModel ExperimentConfig::image_model() const {
  return CleanImageModel(basis_count, frequency_cap, amplitude,
                         image_mode == "file" ? CleanImageModel::Mode::file_backed
                                              : CleanImageModel::Mode::synthetic,
                         image_file);
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig tc;
  tc.steps = steps;
  tc.learning_rate = learning_rate;
  tc.momentum = momentum;
  tc.batch_size = batch_size;
  tc.restarts = restarts;
  tc.weight_clip = weight_clip;
  tc.init_scale = init_scale;
  tc.holdout_size = holdout_size;
  tc.hidden_sizes = hidden_sizes;
  tc.threads = threads;
  return tc;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["dimension"] = {{"d", dimension.d}, {"d_tilde", dimension.d_tilde}, {"sigma", dimension.sigma}};
  j["image_model"] = {{"basis_count", basis_count},
                      {"frequency_cap", frequency_cap},
                      {"amplitude", amplitude},
                      {"mode", image_mode},
                      {"file", image_file}};
  j["partition"] = {{"k", k}, {"k_grid", k_grid}, {"max_support", max_support}};
  j["discriminator"] = {{"hidden_sizes", hidden_sizes},
                        {"weight_clip", weight_clip},
                        {"init_scale", init_scale}};
  j["objective"] = {{"delta", phi_delta},
                    {"epsilon", epsilon},
                    {"lipschitz", lipschitz},
                    {"phi_lipschitz", phi_lipschitz}};
  j["training"] = {{"steps", steps},          {"learning_rate", learning_rate},
                   {"momentum", momentum},    {"batch_size", batch_size},
                   {"restarts", restarts},    {"holdout_size", holdout_size}};
  j["evaluation"] = {{"n_real", n_real}, {"n_fake", n_fake}};
  j["compile"] = {{"delta", compile_delta}};
  j["identity"] = {{"n_sets", identity_sets}, {"n_direct", identity_direct}};
  j["concentration"] = {{"trials", concentration_trials},
                        {"d_tilde", concentration_d_tilde},
                        {"k_grid", concentration_k_grid}};
  j["finite_sample"] = {{"set_factor", finite_sample_factor}, {"k", finite_sample_k}};
  j["birthday"] = {{"samples", birthday_samples}, {"trials", birthday_trials}, {"k", birthday_k}};
  j["master_seed"] = master_seed;
  j["threads"] = threads;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  Section top(j, "");

  if (top.has("dimension")) {
    Section s(top.raw("dimension"), "dimension.");
    int d = cfg.dimension.d, dt = cfg.dimension.d_tilde;
    double sigma = cfg.dimension.sigma;
    s.get("d", d);
    s.get("d_tilde", dt);
    s.get("sigma", sigma);
    s.finish();
    cfg.dimension = DimensionSpec(d, dt, sigma);
  }
  if (top.has("image_model")) {
    Section s(top.raw("image_model"), "image_model.");
    s.get("basis_count", cfg.basis_count);
    s.get("frequency_cap", cfg.frequency_cap);
    s.get("amplitude", cfg.amplitude);
    s.get("mode", cfg.image_mode);
    s.get("file", cfg.image_file);
    s.finish();
  }
  if (top.has("partition")) {
    Section s(top.raw("partition"), "partition.");
    s.get("k", cfg.k);
    s.get("k_grid", cfg.k_grid);
    s.get("max_support", cfg.max_support);
    s.finish();
  }
  if (top.has("discriminator")) {
    Section s(top.raw("discriminator"), "discriminator.");
    s.get("hidden_sizes", cfg.hidden_sizes);
    s.get("weight_clip", cfg.weight_clip);
    s.get("init_scale", cfg.init_scale);
    s.finish();
  }
  if (top.has("objective")) {
    Section s(top.raw("objective"), "objective.");
    s.get("delta", cfg.phi_delta);
    s.get("epsilon", cfg.epsilon);
    s.get("lipschitz", cfg.lipschitz);
    s.get("phi_lipschitz", cfg.phi_lipschitz);
    s.finish();
  }
  if (top.has("training")) {
    Section s(top.raw("training"), "training.");
    s.get("steps", cfg.steps);
    s.get("learning_rate", cfg.learning_rate);
    s.get("momentum", cfg.momentum);
    s.get("batch_size", cfg.batch_size);
    s.get("restarts", cfg.restarts);
    s.get("holdout_size", cfg.holdout_size);
    s.finish();
  }
  if (top.has("evaluation")) {
    Section s(top.raw("evaluation"), "evaluation.");
    s.get("n_real", cfg.n_real);
    s.get("n_fake", cfg.n_fake);
    s.finish();
  }
  if (top.has("compile")) {
    Section s(top.raw("compile"), "compile.");
    s.get("delta", cfg.compile_delta);
    s.finish();
  }
  if (top.has("identity")) {
    Section s(top.raw("identity"), "identity.");
    s.get("n_sets", cfg.identity_sets);
    s.get("n_direct", cfg.identity_direct);
    s.finish();
  }
  if (top.has("concentration")) {
    Section s(top.raw("concentration"), "concentration.");
    s.get("trials", cfg.concentration_trials);
    s.get("d_tilde", cfg.concentration_d_tilde);
    s.get("k_grid", cfg.concentration_k_grid);
    s.finish();
  }
  if (top.has("finite_sample")) {
    Section s(top.raw("finite_sample"), "finite_sample.");
    s.get("set_factor", cfg.finite_sample_factor);
    s.get("k", cfg.finite_sample_k);
    s.finish();
  }
  if (top.has("birthday")) {
    Section s(top.raw("birthday"), "birthday.");
    s.get("samples", cfg.birthday_samples);
    s.get("trials", cfg.birthday_trials);
    s.get("k", cfg.birthday_k);
    s.finish();
  }
  top.get("master_seed", cfg.master_seed);
  top.get("threads", cfg.threads);
  top.finish();
  cfg.validate();
  return cfg;
}

PairOracle make_real_oracle(const CleanImageModel& model, const DimensionSpec& spec) {
  if (model.mode == CleanImageModel::Mode::file_backed) {
    auto records =
        std::make_shared<const std::vector<ImageVector>>(read_image_file(model.file));
    if (records->empty()) throw std::runtime_error("make_real_oracle: empty image file");
    for (const auto& r : *records)
      if (static_cast<int>(r.size()) != spec.d)
        throw std::runtime_error("make_real_oracle: image file record length != d");
    return [records, spec](RandomStream& rng) {
      const ImageVector& x_tilde = (*records)[rng.uniform_int(records->size())];
      SeedVector z = sample_seed(rng, spec);
      ImageVector x = splice(x_tilde, z, spec);
      return std::make_pair(std::move(x), std::move(z));
    };
  }
  CleanImageModel m = model;
  return [m, spec](RandomStream& rng) mutable {
    return sample_noised_image(rng, m, spec);
  };
}

PairOracle make_fake_oracle(const MemorizingGenerator& gen) {
  return [&gen](RandomStream& rng) {
    SeedVector z = sample_seed(rng, gen.spec);
    ImageVector x = generate(gen, z);
    return std::make_pair(std::move(x), std::move(z));
  };
}

PairOracle make_mismatched_oracle(const CleanImageModel& model, const DimensionSpec& spec) {
  PairOracle real = make_real_oracle(model, spec);
  return [real, spec](RandomStream& rng) {
    auto [x, z_true] = real(rng);
    (void)z_true;  // the code is re-randomized, not the extracted noise
    SeedVector z = sample_seed(rng, spec);
    return std::make_pair(std::move(x), std::move(z));
  };
}

NonCollidingSet sample_noncolliding(RandomStream& rng, const BlockPartition& part) {
  NonCollidingSet set;
  set.seeds.reserve(part.m);
  for (std::int64_t b = 1; b <= part.m; ++b)
    set.seeds.push_back(sample_within_block(rng, b, part));
  return set;
}

IdentityCheck check_noncolliding_identity(const Discriminator& disc,
                                          const MemorizingGenerator& gen,
                                          int n_sets, std::int64_t n_direct,
                                          RandomStream& rng, const MeasuringFunction& mf) {
  if (n_sets < 100 || n_direct < 100)
    throw std::invalid_argument("check_noncolliding_identity: need n_sets, n_direct >= 100");
  Welford strat;
  for (int i = 0; i < n_sets; ++i) {
    const NonCollidingSet set = sample_noncolliding(rng, gen.partition);
    double mean = 0.0;
    for (const auto& z : set.seeds)
      mean += phi(disc.forward(generate(gen, z), z), mf);
    strat.add(mean / static_cast<double>(set.seeds.size()));
  }
  Welford direct;
  for (std::int64_t i = 0; i < n_direct; ++i) {
    const SeedVector z = sample_seed(rng, gen.spec);
    direct.add(phi(disc.forward(generate(gen, z), z), mf));
  }
  IdentityCheck out;
  out.stratified_mean = strat.mean;
  out.direct_mean = direct.mean;
  out.stratified_std_err = strat.std_err();
  out.direct_std_err = direct.std_err();
  const double se = std::sqrt(out.stratified_std_err * out.stratified_std_err +
                              out.direct_std_err * out.direct_std_err);
  out.z_score = se > 0.0 ? std::abs(strat.mean - direct.mean) / se : 0.0;
  return out;
}

double run_birthday_trials(const MemorizingGenerator& gen, int s, int trials,
                           RandomStream& rng, int threads) {
  if (s < 2) throw std::invalid_argument("run_birthday_trials: need s >= 2");
  if (trials < 1) throw std::invalid_argument("run_birthday_trials: need trials >= 1");
  const std::vector<int> pos = spliced_positions(gen.spec);
  std::vector<char> collided(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    RandomStream trial_rng = rng.derive("birthday.trial", t);
    std::unordered_set<std::string> seen;
    for (int i = 0; i < s; ++i) {
      const SeedVector z = sample_seed(trial_rng, gen.spec);
      if (!seen.insert(nonspliced_key(generate(gen, z), pos, gen.spec.d_tilde)).second) {
        collided[t] = 1;
        break;
      }
    }
  });
  std::int64_t hits = 0;
  for (char c : collided) hits += c;
  return static_cast<double>(hits) / trials;
}

ExperimentReport run_collapse_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const RandomStream root(cfg.master_seed);
  const CleanImageModel model = cfg.image_model();
  const MeasuringFunction mf{cfg.phi_delta};
  const DimensionSpec& spec = cfg.dimension;

  TheoremBudget budget;
  {
    Discriminator probe(
        [&] {
          std::vector<int> sizes{spec.d + spec.d_tilde};
          for (int h : cfg.hidden_sizes) sizes.push_back(h);
          sizes.push_back(1);
          return sizes;
        }(),
        cfg.weight_clip);
    budget = {probe.capacity(), cfg.phi_delta, cfg.lipschitz, cfg.phi_lipschitz,
              cfg.epsilon};
  }

  ExperimentReport report;
  report.csv_header = {"k",       "m",           "gap",
                       "std_err", "real_term",   "fake_term",
                       "census",  "census_samples", "compiled_weights",
                       "predicted_bound", "encoder_weights"};
  auto cells = nlohmann::json::array();

  for (std::size_t ci = 0; ci < cfg.k_grid.size(); ++ci) {
    const int k = cfg.k_grid[ci];
    const RandomStream cell = root.derive("collapse.cell", ci);
    nlohmann::json cj;
    cj["k"] = k;
    try {
      const BlockPartition part = make_partition(k, spec.d_tilde, spec.sigma, cfg.max_support);
      RandomStream gen_rng = cell.derive("gen");
      CleanImageModel build_model = model;
      const MemorizingGenerator gen = build_generator(gen_rng, part, build_model, spec);

      const PairOracle real = make_real_oracle(model, spec);
      const PairOracle fake = make_fake_oracle(gen);
      const TrainResult tr = train_discriminator(cell.derive("train"), real, fake,
                                                 spec.d + spec.d_tilde, cfg.train_config(), mf);
      RandomStream eval_rng = cell.derive("eval");
      const ObjectiveEstimate est =
          bigan_objective(tr.best, real, fake, cfg.n_real, cfg.n_fake, eval_rng, mf);

      RandomStream census_rng = cell.derive("census");
      const std::int64_t census = support_census(gen, cfg.n_fake, census_rng);

      const auto [net, comp] = compile_generator(gen, cfg.compile_delta);
      const std::size_t enc_weights = encoder_as_network(spec).nonzero_weights();

      cj["m"] = part.m;
      cj["gap"] = est.gap;
      cj["std_err"] = est.std_err;
      cj["real_term"] = est.real_term;
      cj["fake_term"] = est.fake_term;
      cj["best_restart"] = tr.best_restart;
      cj["best_sign"] = tr.best_sign;
      cj["holdout_gap"] = tr.holdout.gap;
      cj["support_census"] = census;
      cj["census_samples"] = cfg.n_fake;
      cj["compiled_nonzero_weights"] = comp.nonzero_weights;
      cj["compiled_predicted_bound"] = comp.predicted_bound;
      cj["encoder_nonzero_weights"] = enc_weights;
      report.csv_rows.push_back({static_cast<double>(k), static_cast<double>(part.m),
                                 est.gap, est.std_err, est.real_term, est.fake_term,
                                 static_cast<double>(census), static_cast<double>(cfg.n_fake),
                                 static_cast<double>(comp.nonzero_weights),
                                 static_cast<double>(comp.predicted_bound),
                                 static_cast<double>(enc_weights)});
    } catch (const std::exception& e) {
      cj["error"] = e.what();
    }
    cells.push_back(std::move(cj));
  }

  report.json["schema_version"] = 1;
  report.json["experiment"] = "collapse";
  report.json["config"] = cfg.to_json();
  report.json["budget"] = {{"p", budget.p},
                           {"delta", budget.delta},
                           {"lipschitz", budget.lipschitz},
                           {"phi_lipschitz", budget.phi_lipschitz},
                           {"epsilon", budget.epsilon},
                           {"theorem_m", theorem_support_size(budget)}};
  report.json["cells"] = std::move(cells);
  return report;
}

ExperimentReport run_concentration_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const RandomStream root(cfg.master_seed);
  const CleanImageModel model = cfg.image_model();
  const MeasuringFunction mf{cfg.phi_delta};
  const DimensionSpec spec(cfg.dimension.d, cfg.concentration_d_tilde, cfg.dimension.sigma);

  ExperimentReport report;
  report.csv_header = {"k", "m", "objective_std", "objective_mean", "trials"};
  auto cells = nlohmann::json::array();
  std::vector<double> stds;

  for (std::size_t ci = 0; ci < cfg.concentration_k_grid.size(); ++ci) {
    const int k = cfg.concentration_k_grid[ci];
    const RandomStream cell = root.derive("concentration.cell", ci);
    const BlockPartition part = make_partition(k, spec.d_tilde, spec.sigma, cfg.max_support);

    // one trained discriminator per m, held fixed across generator redraws
    RandomStream gen0_rng = cell.derive("gen0");
    CleanImageModel build_model = model;
    const MemorizingGenerator gen0 = build_generator(gen0_rng, part, build_model, spec);
    const PairOracle real = make_real_oracle(model, spec);
    const PairOracle fake0 = make_fake_oracle(gen0);
    const TrainResult tr = train_discriminator(cell.derive("train"), real, fake0,
                                               spec.d + spec.d_tilde, cfg.train_config(), mf);

    std::vector<double> means(cfg.concentration_trials, 0.0);
    parallel_for(cfg.concentration_trials, cfg.threads, [&](std::size_t t) {
      RandomStream trial_gen = cell.derive("trial.gen", t);
      CleanImageModel trial_model = model;
      const MemorizingGenerator gen_t = build_generator(trial_gen, part, trial_model, spec);
      RandomStream trial_set = cell.derive("trial.set", t);
      const NonCollidingSet set = sample_noncolliding(trial_set, part);
      double mean = 0.0;
      for (const auto& z : set.seeds)
        mean += phi(tr.best.forward(generate(gen_t, z), z), mf);
      means[t] = mean / static_cast<double>(set.seeds.size());
    });

    Welford w;
    for (double v : means) w.add(v);
    stds.push_back(w.stddev());

    nlohmann::json cj;
    cj["k"] = k;
    cj["m"] = part.m;
    cj["objective_std"] = w.stddev();
    cj["objective_mean"] = w.mean;
    cj["trials"] = cfg.concentration_trials;
    cj["per_generator_means"] = means;
    cells.push_back(std::move(cj));
    report.csv_rows.push_back({static_cast<double>(k), static_cast<double>(part.m),
                               w.stddev(), w.mean,
                               static_cast<double>(cfg.concentration_trials)});
  }

  auto ratios = nlohmann::json::array();
  for (std::size_t i = 1; i < stds.size(); ++i)
    ratios.push_back(stds[i - 1] > 0.0 ? stds[i] / stds[i - 1] : 0.0);

  report.json["schema_version"] = 1;
  report.json["experiment"] = "concentration";
  report.json["config"] = cfg.to_json();
  report.json["cells"] = std::move(cells);
  report.json["std_ratios"] = std::move(ratios);
  return report;
}

ExperimentReport run_finite_sample_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const RandomStream root(cfg.master_seed);
  const RandomStream run = root.derive("finite_sample");
  const CleanImageModel model = cfg.image_model();
  const MeasuringFunction mf{cfg.phi_delta};
  const DimensionSpec& spec = cfg.dimension;

  const BlockPartition part =
      make_partition(cfg.finite_sample_k, spec.d_tilde, spec.sigma, cfg.max_support);
  RandomStream gen_rng = run.derive("gen");
  CleanImageModel build_model = model;
  const MemorizingGenerator gen = build_generator(gen_rng, part, build_model, spec);

  const std::int64_t set_size = static_cast<std::int64_t>(cfg.finite_sample_factor) * part.m;
  const PairOracle real = make_real_oracle(model, spec);
  const PairOracle fake = make_fake_oracle(gen);

  using Pair = std::pair<ImageVector, SeedVector>;
  std::vector<Pair> S, T;
  {
    RandomStream s_rng = run.derive("S");
    for (std::int64_t i = 0; i < set_size; ++i) S.push_back(real(s_rng));
    RandomStream t_rng = run.derive("T");
    for (std::int64_t i = 0; i < set_size; ++i) T.push_back(fake(t_rng));
  }

  const PairOracle real_emp = [&S](RandomStream& rng) { return S[rng.uniform_int(S.size())]; };
  const PairOracle fake_emp = [&T](RandomStream& rng) { return T[rng.uniform_int(T.size())]; };

  const TrainResult tr = train_discriminator(run.derive("train"), real_emp, fake_emp,
                                             spec.d + spec.d_tilde, cfg.train_config(), mf);

  Welford emp_r, emp_f;
  for (const auto& [x, z] : S) emp_r.add(phi(tr.best.forward(x, z), mf));
  for (const auto& [x, z] : T) emp_f.add(phi(tr.best.forward(x, z), mf));
  const double emp_gap = std::abs(emp_r.mean - emp_f.mean);
  const double emp_se = std::sqrt(emp_r.var() / emp_r.n + emp_f.var() / emp_f.n);

  RandomStream pop_rng = run.derive("pop");
  const ObjectiveEstimate pop =
      bigan_objective(tr.best, real, fake, cfg.n_real, cfg.n_fake, pop_rng, mf);

  const double combined_se = std::sqrt(emp_se * emp_se + pop.std_err * pop.std_err);

  ExperimentReport report;
  report.json["schema_version"] = 1;
  report.json["experiment"] = "finite_sample";
  report.json["config"] = cfg.to_json();
  report.json["m"] = part.m;
  report.json["set_size"] = set_size;
  report.json["empirical_gap"] = emp_gap;
  report.json["empirical_std_err"] = emp_se;
  report.json["population_gap"] = pop.gap;
  report.json["population_std_err"] = pop.std_err;
  report.json["difference"] = std::abs(emp_gap - pop.gap);
  report.json["combined_std_err"] = combined_se;
  report.csv_header = {"m", "set_size", "empirical_gap", "population_gap", "difference",
                       "combined_std_err"};
  report.csv_rows.push_back({static_cast<double>(part.m), static_cast<double>(set_size),
                             emp_gap, pop.gap, std::abs(emp_gap - pop.gap), combined_se});
  return report;
}

ExperimentReport run_birthday_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const RandomStream root(cfg.master_seed);
  const RandomStream run = root.derive("birthday");
  const CleanImageModel model = cfg.image_model();
  const DimensionSpec& spec = cfg.dimension;

  const BlockPartition part =
      make_partition(cfg.birthday_k, spec.d_tilde, spec.sigma, cfg.max_support);
  RandomStream gen_rng = run.derive("gen");
  CleanImageModel build_model = model;
  const MemorizingGenerator gen = build_generator(gen_rng, part, build_model, spec);

  RandomStream main_rng = run.derive("main");
  const double freq = run_birthday_trials(gen, cfg.birthday_samples, cfg.birthday_trials,
                                          main_rng, cfg.threads);
  RandomStream pair_rng = run.derive("pair");
  const double pair_freq =
      run_birthday_trials(gen, 2, cfg.birthday_trials, pair_rng, cfg.threads);

  const double s = cfg.birthday_samples;
  const double m = static_cast<double>(part.m);
  const double expected = 1.0 - std::exp(-s * (s - 1.0) / (2.0 * m));
  const double expected_pair = 1.0 / m;
  const double sigma_main = std::sqrt(expected * (1.0 - expected) / cfg.birthday_trials);
  const double sigma_pair =
      std::sqrt(expected_pair * (1.0 - expected_pair) / cfg.birthday_trials);

  ExperimentReport report;
  report.json["schema_version"] = 1;
  report.json["experiment"] = "birthday";
  report.json["config"] = cfg.to_json();
  report.json["m"] = part.m;
  report.json["s"] = cfg.birthday_samples;
  report.json["trials"] = cfg.birthday_trials;
  report.json["collision_frequency"] = freq;
  report.json["expected_approx"] = expected;
  report.json["binomial_sigma"] = sigma_main;
  report.json["pair_frequency"] = pair_freq;
  report.json["pair_expected"] = expected_pair;
  report.json["pair_sigma"] = sigma_pair;
  report.csv_header = {"m", "s", "trials", "collision_frequency", "expected_approx",
                       "pair_frequency", "pair_expected"};
  report.csv_rows.push_back({m, s, static_cast<double>(cfg.birthday_trials), freq, expected,
                             pair_freq, expected_pair});
  return report;
}

}  // namespace memgan
