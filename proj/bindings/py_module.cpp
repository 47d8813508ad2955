#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "larsen/bench.hpp"
#include "larsen/data.hpp"
#include "larsen/elm.hpp"
#include "larsen/gasen.hpp"
#include "larsen/mrsr.hpp"
#include "larsen/numerics.hpp"
#include "larsen/pipeline.hpp"

namespace py = pybind11;
using namespace larsen;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Selective ensembles of randomized networks with variable filtering";

  // --- numerics ------------------------------------------------------------
  m.def("pseudoinverse", &pseudoinverse, py::arg("matrix"),
        "Moore-Penrose pseudoinverse via SVD with a scaled tolerance.");
  m.def("lstsq", &lstsq, py::arg("a"), py::arg("b"),
        "Minimum-norm least squares solution of a x = b.");

  // --- randomness ----------------------------------------------------------
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("stream"),
        "Stable sub-seed for a named stream of a master seed.");
  m.def(
      "bag_sample",
      [](Index n_rows, std::uint64_t seed) {
        Rng rng(seed);
        return bag_sample(n_rows, rng);
      },
      py::arg("n_rows"), py::arg("seed"),
      "One bootstrap bag: n_rows draws with replacement, deterministic in seed.");

  // --- elm -----------------------------------------------------------------
  py::class_<ElmConfig>(m, "ElmConfig")
      .def(py::init<>())
      .def_readwrite("hidden_count", &ElmConfig::hidden_count)
      .def_readwrite("input_weight_min", &ElmConfig::input_weight_min)
      .def_readwrite("input_weight_max", &ElmConfig::input_weight_max)
      .def_readwrite("bias_min", &ElmConfig::bias_min)
      .def_readwrite("bias_max", &ElmConfig::bias_max)
      .def_readwrite("seed", &ElmConfig::seed)
      .def_property(
          "activation",
          [](const ElmConfig& c) { return to_string(c.activation); },
          [](ElmConfig& c, const std::string& name) {
            c.activation = activation_from_string(name);
          })
      .def("validate", &ElmConfig::validate);

  py::class_<ElmModel>(m, "ElmModel")
      .def_readonly("input_weights", &ElmModel::input_weights)
      .def_readonly("biases", &ElmModel::biases)
      .def_readonly("output_weights", &ElmModel::output_weights)
      .def_readonly("input_dim", &ElmModel::input_dim)
      .def_readonly("output_dim", &ElmModel::output_dim)
      .def_readonly("seed", &ElmModel::seed)
      .def_property_readonly(
          "activation", [](const ElmModel& m_) { return to_string(m_.activation); })
      .def("to_json", [](const ElmModel& m_) { return elm_to_json(m_).dump(); });
  m.def(
      "elm_from_json",
      [](const std::string& text) { return elm_from_json(nlohmann::json::parse(text)); },
      py::arg("text"));

  m.def("elm_train", &elm_train, py::arg("x"), py::arg("t"), py::arg("config"),
        "Train a single-hidden-layer network with random hidden parameters.");
  m.def("elm_predict", &elm_predict, py::arg("model"), py::arg("x"));
  m.def("elm_hidden_matrix", &elm_hidden_matrix, py::arg("model"), py::arg("x"));

  // --- mrsr ----------------------------------------------------------------
  py::class_<LarsStep>(m, "LarsStep")
      .def_readonly("gamma", &LarsStep::gamma)
      .def_readonly("c_max", &LarsStep::c_max)
      .def_readonly("active", &LarsStep::active)
      .def_readonly("weights", &LarsStep::weights);

  py::class_<LarsPath>(m, "LarsPath")
      .def_readonly("n_regressors", &LarsPath::n_regressors)
      .def_readonly("n_targets", &LarsPath::n_targets)
      .def_readonly("entry_order", &LarsPath::entry_order)
      .def_readonly("excluded", &LarsPath::excluded)
      .def_readonly("steps", &LarsPath::steps)
      .def_readonly("x_mean", &LarsPath::x_mean)
      .def_readonly("x_scale", &LarsPath::x_scale)
      .def_readonly("t_mean", &LarsPath::t_mean);

  py::class_<VariableSelection>(m, "VariableSelection")
      .def_readonly("ranked", &VariableSelection::ranked)
      .def_readonly("kept", &VariableSelection::kept)
      .def_readonly("k_star", &VariableSelection::k_star)
      .def_readonly("k_values", &VariableSelection::k_values)
      .def_readonly("val_mse", &VariableSelection::val_mse)
      .def_readonly("excluded", &VariableSelection::excluded);

  m.def("cumulative_correlation", &cumulative_correlation, py::arg("residual"),
        py::arg("x"));
  m.def("mrsr_path", &mrsr_path, py::arg("x"), py::arg("t"),
        "Full forward-selection path over standardized inputs.");
  m.def("select_variables", &select_variables, py::arg("x"), py::arg("t"),
        py::arg("val_fraction"), py::arg("seed"),
        "Rank regressors and keep the shortest prefix within one standard "
        "error of the best holdout MSE.");

  // --- gasen ---------------------------------------------------------------
  py::class_<GaConfig>(m, "GaConfig")
      .def(py::init<>())
      .def_readwrite("population", &GaConfig::population)
      .def_readwrite("generations", &GaConfig::generations)
      .def_readwrite("crossover_fraction", &GaConfig::crossover_fraction)
      .def_readwrite("mutation_rate", &GaConfig::mutation_rate)
      .def_readwrite("elitism", &GaConfig::elitism)
      .def_readwrite("seed", &GaConfig::seed)
      .def("validate", &GaConfig::validate);

  py::class_<ClosedFormWeights>(m, "ClosedFormWeights")
      .def_readonly("weights", &ClosedFormWeights::weights)
      .def_readonly("condition", &ClosedFormWeights::condition)
      .def_readonly("ill_conditioned", &ClosedFormWeights::ill_conditioned);

  py::class_<GaResult>(m, "GaResult")
      .def_readonly("best", &GaResult::best)
      .def_readonly("best_fitness", &GaResult::best_fitness)
      .def_readonly("trace", &GaResult::trace);

  py::class_<GasenResult>(m, "GasenResult")
      .def_readonly("selected", &GasenResult::selected)
      .def_readonly("weights", &GasenResult::weights)
      .def_readonly("ga_trace", &GasenResult::ga_trace);

  m.def("normalize_weights", &normalize_weights, py::arg("w"));
  m.def("correlation_matrix", &correlation_matrix, py::arg("predictions"),
        py::arg("targets"),
        "Pairwise error correlations of member predictions on shared rows.");
  m.def("ensemble_error", &ensemble_error, py::arg("weights"), py::arg("correlation"));
  m.def("optimal_weights_closed_form", &optimal_weights_closed_form,
        py::arg("correlation"));
  m.def("ga_evolve", &ga_evolve, py::arg("fitness"), py::arg("genome_size"),
        py::arg("config"),
        "Real-coded GA over [0,1]^genome_size; fitness must be positive finite.");
  m.def("gasen_select_predictions", &gasen_select_predictions, py::arg("predictions"),
        py::arg("validation_y"), py::arg("lambda_"), py::arg("config"));
  m.def("gasen_select", &gasen_select, py::arg("members"), py::arg("validation_x"),
        py::arg("validation_y"), py::arg("lambda_"), py::arg("config"));

  // --- pipeline ------------------------------------------------------------
  py::class_<LarsenConfig>(m, "LarsenConfig")
      .def(py::init<>())
      .def_readwrite("members", &LarsenConfig::members)
      .def_readwrite("lambda_", &LarsenConfig::lambda)
      .def_readwrite("lars_enabled", &LarsenConfig::lars_enabled)
      .def_readwrite("val_fraction", &LarsenConfig::val_fraction)
      .def_readwrite("elm", &LarsenConfig::elm)
      .def_readwrite("ga", &LarsenConfig::ga)
      .def_readwrite("seed", &LarsenConfig::seed)
      .def("validate", &LarsenConfig::validate);

  py::class_<EnsembleModel>(m, "EnsembleModel")
      .def_readonly("lars_enabled", &EnsembleModel::lars_enabled)
      .def_readonly("input_dim", &EnsembleModel::input_dim)
      .def_readonly("selection", &EnsembleModel::selection)
      .def_readonly("members", &EnsembleModel::members)
      .def_readonly("bags", &EnsembleModel::bags)
      .def_readonly("gasen", &EnsembleModel::gasen)
      .def("to_json", [](const EnsembleModel& m_) { return ensemble_to_json(m_).dump(); });
  m.def(
      "ensemble_from_json",
      [](const std::string& text) {
        return ensemble_from_json(nlohmann::json::parse(text));
      },
      py::arg("text"));

  m.def("larsen_fit", &larsen_fit, py::arg("x"), py::arg("y"), py::arg("config"),
        "Filter inputs, bag-train members, evolve weights, keep survivors.");
  m.def("larsen_predict", &larsen_predict, py::arg("model"), py::arg("x"));

  // --- data ----------------------------------------------------------------
  py::class_<Dataset>(m, "Dataset")
      .def(py::init<>())
      .def_readwrite("name", &Dataset::name)
      .def_readwrite("x", &Dataset::x)
      .def_readwrite("y", &Dataset::y)
      .def_readwrite("column_labels", &Dataset::column_labels)
      .def_readwrite("target_label", &Dataset::target_label)
      .def_readwrite("noise_mask", &Dataset::noise_mask)
      .def("manifest", [](const Dataset& ds) { return dataset_manifest(ds).dump(); });

  py::class_<NoiseProfile>(m, "NoiseProfile")
      .def(py::init<>())
      .def_readwrite("sigmas", &NoiseProfile::sigmas)
      .def_readwrite("seed", &NoiseProfile::seed);

  py::class_<StandardizeStats>(m, "StandardizeStats")
      .def_readonly("mean", &StandardizeStats::mean)
      .def_readonly("sd", &StandardizeStats::sd)
      .def_readonly("zero_variance", &StandardizeStats::zero_variance);

  py::class_<StandardizedPair>(m, "StandardizedPair")
      .def_readonly("train", &StandardizedPair::train)
      .def_readonly("test", &StandardizedPair::test)
      .def_readonly("stats", &StandardizedPair::stats);

  m.def("seven_sigmas", &seven_sigmas);
  m.def("ten_sigmas", &ten_sigmas);
  m.def("load_csv", &load_csv, py::arg("path"), py::arg("target_column"));
  m.def("save_csv", &save_csv, py::arg("dataset"), py::arg("path"));
  m.def("split", &split, py::arg("dataset"), py::arg("n_train"), py::arg("seed"));
  m.def("split_at", &split_at, py::arg("dataset"), py::arg("n_train"));
  m.def("standardize", &standardize, py::arg("train"), py::arg("test"));
  m.def("blend_noise", &blend_noise, py::arg("dataset"), py::arg("profile"));
  m.def("gen_two_sines", &gen_two_sines, py::arg("n"), py::arg("lo"), py::arg("hi"),
        py::arg("profile"));

  // --- bench ---------------------------------------------------------------
  m.def(
      "run_experiment_json",
      [](const std::string& spec_text, bool include_timings) {
        const ExperimentSpec spec = spec_from_json(nlohmann::json::parse(spec_text));
        return report_to_json(run_experiment(spec), include_timings).dump();
      },
      py::arg("spec_json"), py::arg("include_timings") = false,
      "Run a full experiment from a JSON spec and return the JSON report.");
  m.def("default_spec_json",
        [] { return spec_to_json(ExperimentSpec{}).dump(); });
}
