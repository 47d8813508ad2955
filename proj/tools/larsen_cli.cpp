#include "CLI11.hpp"

#include "larsen/bench.hpp"
#include "larsen/data.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

struct CommonOptions {
  std::vector<std::string> methods = {"elm", "gasen-elm", "larsen-elm"};
  int runs = 5;
  std::uint64_t seed = 0;
  int hidden = 50;
  int members = 20;
  double lambda = 0.05;
  std::string activation = "sigmoid";
  int population = 20;
  int generations = 100;
  std::string out;
  std::string csv;
  std::string trace_csv;
  bool deterministic_json = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& c) {
  cmd->add_option("--methods", c.methods,
                  "comma-separated subset of elm,gasen-elm,larsen-elm")
      ->delimiter(',');
  cmd->add_option("--runs", c.runs, "independent repetitions");
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--hidden", c.hidden, "hidden units per network");
  cmd->add_option("--members", c.members, "ensemble size before pruning");
  cmd->add_option("--lambda", c.lambda, "weight threshold for member survival");
  cmd->add_option("--activation", c.activation, "sigmoid, tanh or hardlimit");
  cmd->add_option("--population", c.population, "GA population");
  cmd->add_option("--generations", c.generations, "GA generations");
  cmd->add_option("--out", c.out, "write the JSON report here");
  cmd->add_option("--csv", c.csv, "write the per-run CSV here");
  cmd->add_option("--ga-trace-csv", c.trace_csv, "write per-generation GA fitness here");
  cmd->add_flag("--deterministic-json", c.deterministic_json,
                "omit wall-clock timings from the JSON report so identical "
                "configurations give byte-identical files");
  cmd->add_flag("--quiet", c.quiet, "suppress the summary table");
}

larsen::ExperimentSpec base_spec(const CommonOptions& c) {
  larsen::ExperimentSpec spec;
  spec.methods = c.methods;
  spec.runs = c.runs;
  spec.seed = c.seed;
  spec.pipeline.members = c.members;
  spec.pipeline.lambda = c.lambda;
  spec.pipeline.elm.hidden_count = c.hidden;
  spec.pipeline.elm.activation = larsen::activation_from_string(c.activation);
  spec.pipeline.ga.population = c.population;
  spec.pipeline.ga.generations = c.generations;
  return spec;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    throw larsen::ContractViolation("cannot open '" + path + "' for writing");
  }
  out << content;
  if (!out) {
    throw larsen::NumericFailure("write to '" + path + "' failed");
  }
}

int emit(const larsen::ExperimentReport& report, const CommonOptions& c) {
  if (!c.out.empty()) {
    write_file(c.out, larsen::report_to_json(report, !c.deterministic_json).dump(2) + "\n");
  }
  if (!c.csv.empty()) {
    write_file(c.csv, larsen::report_csv(report));
  }
  if (!c.trace_csv.empty()) {
    write_file(c.trace_csv, larsen::ga_trace_csv(report));
  }
  if (!c.quiet) {
    std::cout << larsen::render_report(report);
  }
  for (const auto& method : report.methods) {
    if (method.failures > 0) {
      return 4;
    }
  }
  return 0;
}

struct NamedDataset {
  const char* file;
  const char* target;
  larsen::Index n_train;
};

// Training-row counts follow the standard benchmark splits.
const std::map<std::string, NamedDataset> kNamedDatasets = {
    {"boston", {"boston_housing.csv", "medv", 400}},
    {"abalone", {"abalone.csv", "rings", 2000}},
    {"redwine", {"winequality_red.csv", "quality", 1065}},
    {"waveform", {"waveform.csv", "class", 3000}},
};

std::string resolve_dataset(const std::string& name, std::string& target,
                            larsen::Index& n_train) {
  if (std::filesystem::exists(name)) {
    return name;
  }
  const auto it = kNamedDatasets.find(name);
  if (it == kNamedDatasets.end()) {
    throw larsen::ContractViolation(
        "dataset '" + name + "' is neither a file nor a known name (known: boston, "
        "abalone, redwine, waveform)");
  }
  if (target.empty()) {
    target = it->second.target;
  }
  if (n_train == 0) {
    n_train = it->second.n_train;
  }
  std::vector<std::filesystem::path> roots;
  if (const char* env = std::getenv("LARSEN_DATA_DIR")) {
    roots.emplace_back(env);
  }
  roots.emplace_back("data");
  roots.emplace_back(".");
  for (const auto& root : roots) {
    const auto candidate = root / it->second.file;
    if (std::filesystem::exists(candidate)) {
      return candidate.string();
    }
  }
  throw larsen::ContractViolation(
      "dataset file '" + std::string(it->second.file) +
      "' not found (searched $LARSEN_DATA_DIR, ./data, .); fetch it with "
      "tools/fetch_datasets.py or pass a csv path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LARS-filtered selective ELM ensembles for regression"};
  app.require_subcommand(1);

  CommonOptions synth_common;
  auto* synth = app.add_subcommand(
      "synth", "two-sines benchmark with planted Gaussian distractor inputs");
  larsen::Index train_points = 2001;
  larsen::Index test_points = 20001;
  std::vector<double> sigmas = {2.0};
  bool clean = false;
  synth->add_option("--train-points", train_points, "training grid size");
  synth->add_option("--test-points", test_points, "test grid size");
  synth->add_option("--noise-sigma", sigmas, "distractor standard deviations")
      ->delimiter(',');
  synth->add_flag("--clean", clean, "no distractor columns");
  add_common(synth, synth_common);

  CommonOptions bench_common;
  auto* bench = app.add_subcommand("bench", "benchmark on a csv regression dataset");
  std::string dataset = "boston";
  std::string target;
  std::string noise = "seven";
  larsen::Index n_train = 0;
  bench->add_option("--dataset", dataset, "known name or csv path");
  bench->add_option("--target", target, "target column (defaults per known name)");
  bench
      ->add_option("--noise", noise,
                   "distractor profile: none, seven or ten Gaussian columns")
      ->check(CLI::IsMember({"none", "seven", "ten"}));
  bench->add_option("--train-rows", n_train, "training rows (default per known name)");
  add_common(bench, bench_common);

  auto* report = app.add_subcommand("report", "re-render a saved JSON report");
  std::string in_path;
  std::string format = "text";
  report->add_option("--in", in_path, "JSON report file")->required();
  report->add_option("--format", format, "text, csv or ga-trace")
      ->check(CLI::IsMember({"text", "csv", "ga-trace"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      larsen::ExperimentSpec spec = base_spec(synth_common);
      spec.dataset = "two-sines";
      spec.synth_train = train_points;
      spec.synth_test = test_points;
      if (clean) {
        spec.noise = "none";
      } else {
        spec.noise = "custom";
        spec.custom_sigmas = sigmas;
      }
      return emit(larsen::run_experiment(spec), synth_common);
    }
    if (bench->parsed()) {
      larsen::ExperimentSpec spec = base_spec(bench_common);
      spec.target_column = target;
      spec.dataset = resolve_dataset(dataset, spec.target_column, n_train);
      if (spec.target_column.empty()) {
        spec.target_column = "target";
      }
      spec.n_train = n_train;
      spec.noise = noise;
      return emit(larsen::run_experiment(spec), bench_common);
    }
    std::ifstream in(in_path);
    if (!in) {
      throw larsen::ContractViolation("cannot open '" + in_path + "'");
    }
    nlohmann::json j;
    in >> j;
    const larsen::ExperimentReport rep = larsen::report_from_json(j);
    if (format == "text") {
      std::cout << larsen::render_report(rep);
    } else if (format == "csv") {
      std::cout << larsen::report_csv(rep);
    } else {
      std::cout << larsen::ga_trace_csv(rep);
    }
    return 0;
  } catch (const larsen::ContractViolation& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
