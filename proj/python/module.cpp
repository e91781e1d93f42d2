#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "memgan/compiler.hpp"
#include "memgan/harness.hpp"
#include "memgan/noise_channel.hpp"

namespace py = pybind11;
using namespace memgan;

PYBIND11_MODULE(_memgan, m) {
  m.doc() = "noise-extracting encoder, memorizing generator, ReLU compiler and "
            "adversarial objective";

  py::class_<RandomStream>(m, "RandomStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("derive", &RandomStream::derive, py::arg("label"), py::arg("index") = 0)
      .def("uniform01", &RandomStream::uniform01)
      .def("gaussian", &RandomStream::gaussian, py::arg("sigma") = 1.0);

  py::class_<DimensionSpec>(m, "DimensionSpec")
      .def(py::init<int, int, double>(), py::arg("d"), py::arg("d_tilde"),
           py::arg("sigma") = 1.0)
      .def_readonly("d", &DimensionSpec::d)
      .def_readonly("d_tilde", &DimensionSpec::d_tilde)
      .def_readonly("sigma", &DimensionSpec::sigma);

  py::class_<CleanImageModel> model(m, "CleanImageModel");
  py::enum_<CleanImageModel::Mode>(model, "Mode")
      .value("synthetic", CleanImageModel::Mode::synthetic)
      .value("file_backed", CleanImageModel::Mode::file_backed);
  model.def(py::init<int, int, double, CleanImageModel::Mode, std::string>(),
            py::arg("basis_count") = 6, py::arg("frequency_cap") = 8,
            py::arg("amplitude") = 1.0,
            py::arg("mode") = CleanImageModel::Mode::synthetic, py::arg("file") = "");

  m.def("sample_seed", &sample_seed, py::arg("rng"), py::arg("spec"));
  m.def("sample_clean_image", &sample_clean_image, py::arg("rng"), py::arg("model"),
        py::arg("spec"));
  m.def("sample_noised_image", &sample_noised_image, py::arg("rng"), py::arg("model"),
        py::arg("spec"));

  m.def("spliced_positions", &spliced_positions, py::arg("spec"));
  m.def("splice", &splice, py::arg("x_tilde"), py::arg("z"), py::arg("spec"));
  m.def("encode", &encode, py::arg("x"), py::arg("spec"));
  m.def("encoder_as_network", &encoder_as_network, py::arg("spec"));

  py::class_<BlockPartition>(m, "BlockPartition")
      .def_readonly("k", &BlockPartition::k)
      .def_readonly("d_tilde", &BlockPartition::d_tilde)
      .def_readonly("sigma", &BlockPartition::sigma)
      .def_readonly("thresholds", &BlockPartition::thresholds)
      .def_readonly("m", &BlockPartition::m)
      .def("to_json_str", [](const BlockPartition& p) { return p.to_json().dump(); });
  m.def("make_partition", &make_partition, py::arg("k"), py::arg("d_tilde"),
        py::arg("sigma"), py::arg("max_support") = kDefaultMaxSupport);
  m.def("half_normal_cdf", &half_normal_cdf, py::arg("t"), py::arg("sigma"));
  m.def("half_normal_quantile", &half_normal_quantile, py::arg("p"), py::arg("sigma"));
  m.def("block_tuple", &block_tuple, py::arg("z"), py::arg("part"));
  m.def("block_index", &block_index, py::arg("tuple"), py::arg("part"));
  m.def("sample_within_block", &sample_within_block, py::arg("rng"), py::arg("block"),
        py::arg("part"));
  m.def("verify_equipartition", &verify_equipartition, py::arg("part"), py::arg("n"),
        py::arg("rng"));

  py::class_<TheoremBudget>(m, "TheoremBudget")
      .def(py::init([](std::int64_t p, double delta, double lipschitz,
                       double phi_lipschitz, double epsilon) {
             return TheoremBudget{p, delta, lipschitz, phi_lipschitz, epsilon};
           }),
           py::arg("p"), py::arg("delta") = 1.0, py::arg("lipschitz") = 1.0,
           py::arg("phi_lipschitz") = 1.0, py::arg("epsilon") = 0.25);
  m.def("theorem_support_size", &theorem_support_size, py::arg("budget"));
  m.def("smallest_k_for_support", &smallest_k_for_support, py::arg("m_target"),
        py::arg("d_tilde"));

  py::class_<MemorizingGenerator>(m, "MemorizingGenerator")
      .def_readonly("partition", &MemorizingGenerator::partition)
      .def_readonly("spec", &MemorizingGenerator::spec)
      .def_readonly("memorized", &MemorizingGenerator::memorized);
  m.def("build_generator", &build_generator, py::arg("rng"), py::arg("partition"),
        py::arg("image_model"), py::arg("spec"));
  m.def("generate", &generate, py::arg("gen"), py::arg("z"));
  m.def("support_census", &support_census, py::arg("gen"), py::arg("n_samples"),
        py::arg("rng"));
  m.def("save_generator",
        [](const MemorizingGenerator& g, const std::string& dir) { save_generator(g, dir); },
        py::arg("gen"), py::arg("dir"));
  m.def("load_generator",
        [](const std::string& dir) { return load_generator(dir); }, py::arg("dir"));

  py::class_<ReluNetwork>(m, "ReluNetwork")
      .def("forward", &ReluNetwork::forward, py::arg("input"))
      .def("nonzero_weights", &ReluNetwork::nonzero_weights)
      .def_property_readonly("input_dim", &ReluNetwork::input_dim)
      .def_property_readonly("output_dim", &ReluNetwork::output_dim)
      .def("to_json_str", [](const ReluNetwork& n) { return n.to_json().dump(); })
      .def_static("from_json_str", [](const std::string& s) {
        return ReluNetwork::from_json(nlohmann::json::parse(s));
      });

  py::class_<CompileReport>(m, "CompileReport")
      .def_readonly("nonzero_weights", &CompileReport::nonzero_weights)
      .def_readonly("nonzero_biases", &CompileReport::nonzero_biases)
      .def_readonly("delta", &CompileReport::delta)
      .def_readonly("ramp_width", &CompileReport::ramp_width)
      .def_readonly("predicted_bound", &CompileReport::predicted_bound);
  m.def("compile_abs", &compile_abs, py::arg("d_tilde"));
  m.def("compile_selector", &compile_selector, py::arg("part"), py::arg("ramp_width"));
  m.def("compile_onehot", &compile_onehot, py::arg("part"));
  m.def("compile_memory", &compile_memory, py::arg("gen"));
  m.def("compile_generator", &compile_generator, py::arg("gen"), py::arg("delta"));
  m.def("compiled_disagreement", &compiled_disagreement, py::arg("gen"), py::arg("net"),
        py::arg("n"), py::arg("rng"));

  py::class_<MeasuringFunction>(m, "MeasuringFunction")
      .def(py::init([](double delta) { return MeasuringFunction{delta}; }),
           py::arg("delta") = 1.0)
      .def_readonly("delta", &MeasuringFunction::delta);
  m.def("phi", &phi, py::arg("t"), py::arg("mf"));
  m.def("phi_derivative", &phi_derivative, py::arg("t"), py::arg("mf"));

  py::class_<Discriminator>(m, "Discriminator")
      .def(py::init<std::vector<int>, double>(), py::arg("layer_sizes"),
           py::arg("weight_clip") = 1.0)
      .def("init_params", &Discriminator::init_params, py::arg("rng"), py::arg("scale"))
      .def("forward",
           py::overload_cast<const ImageVector&, const SeedVector&>(
               &Discriminator::forward, py::const_),
           py::arg("x"), py::arg("z"))
      .def_property_readonly("capacity", &Discriminator::capacity)
      .def("to_json_str", [](const Discriminator& d) { return d.to_json().dump(); })
      .def_static("from_json_str", [](const std::string& s) {
        return Discriminator::from_json(nlohmann::json::parse(s));
      });

  py::class_<ObjectiveEstimate>(m, "ObjectiveEstimate")
      .def_readonly("real_term", &ObjectiveEstimate::real_term)
      .def_readonly("fake_term", &ObjectiveEstimate::fake_term)
      .def_readonly("gap", &ObjectiveEstimate::gap)
      .def_readonly("n_real", &ObjectiveEstimate::n_real)
      .def_readonly("n_fake", &ObjectiveEstimate::n_fake)
      .def_readonly("std_err", &ObjectiveEstimate::std_err);

  m.def("make_real_oracle", &make_real_oracle, py::arg("model"), py::arg("spec"));
  m.def("make_fake_oracle", &make_fake_oracle, py::arg("gen"),
        py::keep_alive<0, 1>());
  m.def("make_mismatched_oracle", &make_mismatched_oracle, py::arg("model"),
        py::arg("spec"));
  m.def("bigan_objective", &bigan_objective, py::arg("disc"), py::arg("real"),
        py::arg("fake"), py::arg("n_real"), py::arg("n_fake"), py::arg("rng"),
        py::arg("mf"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("steps", &TrainConfig::steps)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("momentum", &TrainConfig::momentum)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("restarts", &TrainConfig::restarts)
      .def_readwrite("weight_clip", &TrainConfig::weight_clip)
      .def_readwrite("init_scale", &TrainConfig::init_scale)
      .def_readwrite("holdout_size", &TrainConfig::holdout_size)
      .def_readwrite("hidden_sizes", &TrainConfig::hidden_sizes)
      .def_readwrite("threads", &TrainConfig::threads);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("best", &TrainResult::best)
      .def_readonly("holdout", &TrainResult::holdout)
      .def_readonly("best_restart", &TrainResult::best_restart)
      .def_readonly("best_sign", &TrainResult::best_sign);
  m.def("train_discriminator", &train_discriminator, py::arg("rng"), py::arg("real"),
        py::arg("fake"), py::arg("input_dim"), py::arg("config"), py::arg("mf"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<NonCollidingSet>(m, "NonCollidingSet")
      .def_readonly("seeds", &NonCollidingSet::seeds);
  m.def("sample_noncolliding", &sample_noncolliding, py::arg("rng"), py::arg("part"));

  py::class_<IdentityCheck>(m, "IdentityCheck")
      .def_readonly("stratified_mean", &IdentityCheck::stratified_mean)
      .def_readonly("direct_mean", &IdentityCheck::direct_mean)
      .def_readonly("z_score", &IdentityCheck::z_score);
  m.def("check_noncolliding_identity", &check_noncolliding_identity, py::arg("disc"),
        py::arg("gen"), py::arg("n_sets"), py::arg("n_direct"), py::arg("rng"),
        py::arg("mf"));

  m.def("run_birthday_trials", &run_birthday_trials, py::arg("gen"), py::arg("s"),
        py::arg("trials"), py::arg("rng"), py::arg("threads") = 0);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_static("from_json_str",
                  [](const std::string& s) {
                    return ExperimentConfig::from_json(nlohmann::json::parse(s));
                  })
      .def("to_json_str", [](const ExperimentConfig& c) { return c.to_json().dump(); });

  auto run = [](ExperimentReport (*fn)(const ExperimentConfig&)) {
    return [fn](const ExperimentConfig& cfg) { return fn(cfg).json.dump(); };
  };
  m.def("run_collapse_experiment", run(&run_collapse_experiment), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_concentration_experiment", run(&run_concentration_experiment),
        py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("run_finite_sample_experiment", run(&run_finite_sample_experiment),
        py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("run_birthday_experiment", run(&run_birthday_experiment), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
}
