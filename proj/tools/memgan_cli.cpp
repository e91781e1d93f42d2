// Command-line driver: partition thresholds, generator construction,
// compilation, objective evaluation, adversarial training, and the
// experiment suite. Reports are JSON with a schema_version field; tables
// are also written as CSV next to the JSON output.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "memgan/compiler.hpp"
#include "memgan/harness.hpp"
#include "memgan/io.hpp"
#include "memgan/noise_channel.hpp"

namespace fs = std::filesystem;
using namespace memgan;

namespace {

struct GlobalOpts {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string format = "json";
};

ExperimentConfig load_config(const std::string& path, const GlobalOpts& g) {
  ExperimentConfig cfg =
      path.empty() ? ExperimentConfig{} : ExperimentConfig::from_json(load_json(path));
  if (g.seed) cfg.master_seed = *g.seed;
  if (g.threads) cfg.threads = *g.threads;
  cfg.validate();
  return cfg;
}

void print_table(const ExperimentReport& report) {
  for (std::size_t i = 0; i < report.csv_header.size(); ++i)
    std::printf("%s%s", report.csv_header[i].c_str(),
                i + 1 < report.csv_header.size() ? "," : "\n");
  for (const auto& row : report.csv_rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      std::printf("%.17g%s", row[i], i + 1 < row.size() ? "," : "\n");
  }
}

void emit_report(const ExperimentReport& report, const std::string& out,
                 const GlobalOpts& g) {
  if (!out.empty()) {
    save_json(out, report.json);
    fs::path csv = out;
    csv.replace_extension(".csv");
    write_csv(csv, report.csv_header, report.csv_rows);
  }
  if (g.format == "csv")
    print_table(report);
  else
    std::cout << report.json.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constructed encoder/generator pair and its adversarial verification"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOpts g;
  app.add_option("--seed", g.seed, "override the master seed");
  app.add_option("--threads", g.threads, "worker thread count (0 = hardware)");
  app.add_option("--format", g.format, "stdout format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));

  // thresholds
  auto* cmd_thresholds = app.add_subcommand("thresholds", "half-normal quantile thresholds");
  int th_k = 4;
  double th_sigma = 1.0;
  cmd_thresholds->add_option("--k", th_k, "cells per coordinate")->required();
  cmd_thresholds->add_option("--sigma", th_sigma, "seed standard deviation");

  // build-gen
  auto* cmd_build = app.add_subcommand("build-gen", "build and serialize a generator");
  std::string bg_config, bg_out;
  cmd_build->add_option("--config", bg_config, "experiment config JSON");
  cmd_build->add_option("--out", bg_out, "output directory")->required();

  // compile
  auto* cmd_compile = app.add_subcommand("compile", "compile a generator to a ReLU network");
  std::string cp_gen, cp_out, cp_report;
  double cp_delta = 0.01;
  cmd_compile->add_option("--gen", cp_gen, "generator directory")->required();
  cmd_compile->add_option("--delta", cp_delta, "total-variation budget in (0,1)");
  cmd_compile->add_option("--out", cp_out, "network JSON path")->required();
  cmd_compile->add_option("--report", cp_report, "compile report JSON path");

  // eval-objective
  auto* cmd_eval = app.add_subcommand("eval-objective", "Monte-Carlo objective estimate");
  std::string ev_gen, ev_disc, ev_config;
  std::int64_t ev_n = 20000;
  cmd_eval->add_option("--gen", ev_gen, "generator directory")->required();
  cmd_eval->add_option("--disc", ev_disc, "discriminator checkpoint JSON")->required();
  cmd_eval->add_option("--n", ev_n, "samples per side");
  cmd_eval->add_option("--config", ev_config, "config JSON (image model etc.)");

  // train-disc
  auto* cmd_train = app.add_subcommand("train-disc", "adversarial discriminator training");
  std::string td_gen, td_config, td_out, td_trace;
  cmd_train->add_option("--gen", td_gen, "generator directory")->required();
  cmd_train->add_option("--config", td_config, "experiment config JSON");
  cmd_train->add_option("--out", td_out, "checkpoint JSON path")->required();
  cmd_train->add_option("--trace", td_trace, "training trace CSV path");

  // experiment
  auto* cmd_exp = app.add_subcommand("experiment", "run an experiment and emit a report");
  std::string ex_kind, ex_config, ex_out;
  cmd_exp->add_option("kind", ex_kind, "collapse|concentration|finite-sample|birthday")
      ->required()
      ->check(CLI::IsMember({"collapse", "concentration", "finite-sample", "birthday"}));
  cmd_exp->add_option("--config", ex_config, "experiment config JSON");
  cmd_exp->add_option("--out", ex_out, "report JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_thresholds) {
      const BlockPartition part = make_partition(th_k, 1, th_sigma);
      nlohmann::json j;
      j["k"] = th_k;
      j["sigma"] = th_sigma;
      j["thresholds"] = part.thresholds;
      if (g.format == "csv") {
        std::printf("i,threshold\n");
        for (std::size_t i = 0; i < part.thresholds.size(); ++i)
          std::printf("%zu,%.17g\n", i + 1, part.thresholds[i]);
      } else {
        std::cout << j.dump(2) << "\n";
      }
    } else if (*cmd_build) {
      const ExperimentConfig cfg = load_config(bg_config, g);
      const RandomStream root(cfg.master_seed);
      const BlockPartition part = make_partition(cfg.k, cfg.dimension.d_tilde,
                                                 cfg.dimension.sigma, cfg.max_support);
      CleanImageModel model = cfg.image_model();
      RandomStream gen_rng = root.derive("build-gen");
      const MemorizingGenerator gen = build_generator(gen_rng, part, model, cfg.dimension);
      save_generator(gen, bg_out);
      std::cout << "wrote generator with m=" << part.m << " to " << bg_out << "\n";
    } else if (*cmd_compile) {
      const MemorizingGenerator gen = load_generator(cp_gen);
      const auto [net, rep] = compile_generator(gen, cp_delta);
      save_json(cp_out, net.to_json());
      nlohmann::json rj;
      rj["schema_version"] = 1;
      rj["nonzero_weights"] = rep.nonzero_weights;
      rj["nonzero_biases"] = rep.nonzero_biases;
      rj["delta"] = rep.delta;
      rj["ramp_width"] = rep.ramp_width;
      rj["predicted_bound"] = rep.predicted_bound;
      if (!cp_report.empty()) save_json(cp_report, rj);
      std::cout << rj.dump(2) << "\n";
    } else if (*cmd_eval) {
      const ExperimentConfig cfg = load_config(ev_config, g);
      const MemorizingGenerator gen = load_generator(ev_gen);
      const Discriminator disc = Discriminator::from_json(load_json(ev_disc));
      const MeasuringFunction mf{cfg.phi_delta};
      const PairOracle real = make_real_oracle(cfg.image_model(), gen.spec);
      const PairOracle fake = make_fake_oracle(gen);
      RandomStream rng = RandomStream(cfg.master_seed).derive("eval-objective");
      const ObjectiveEstimate est = bigan_objective(disc, real, fake, ev_n, ev_n, rng, mf);
      nlohmann::json j;
      j["real_term"] = est.real_term;
      j["fake_term"] = est.fake_term;
      j["gap"] = est.gap;
      j["std_err"] = est.std_err;
      j["n_real"] = est.n_real;
      j["n_fake"] = est.n_fake;
      if (g.format == "csv")
        std::printf("real_term,fake_term,gap,std_err\n%.17g,%.17g,%.17g,%.17g\n",
                    est.real_term, est.fake_term, est.gap, est.std_err);
      else
        std::cout << j.dump(2) << "\n";
    } else if (*cmd_train) {
      const ExperimentConfig cfg = load_config(td_config, g);
      const MemorizingGenerator gen = load_generator(td_gen);
      const MeasuringFunction mf{cfg.phi_delta};
      const PairOracle real = make_real_oracle(cfg.image_model(), gen.spec);
      const PairOracle fake = make_fake_oracle(gen);
      const RandomStream root(cfg.master_seed);
      const TrainResult tr =
          train_discriminator(root.derive("train-disc"), real, fake,
                              gen.spec.d + gen.spec.d_tilde, cfg.train_config(), mf);
      save_json(td_out, tr.best.to_json());
      if (!td_trace.empty()) write_trace_csv(td_trace, tr.trace);
      std::cout << "holdout gap " << tr.holdout.gap << " +- " << tr.holdout.std_err
                << " (restart " << tr.best_restart << ", sign " << tr.best_sign << ")\n";
    } else if (*cmd_exp) {
      const ExperimentConfig cfg = load_config(ex_config, g);
      ExperimentReport report;
      if (ex_kind == "collapse")
        report = run_collapse_experiment(cfg);
      else if (ex_kind == "concentration")
        report = run_concentration_experiment(cfg);
      else if (ex_kind == "finite-sample")
        report = run_finite_sample_experiment(cfg);
      else
        report = run_birthday_experiment(cfg);
      emit_report(report, ex_out, g);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
