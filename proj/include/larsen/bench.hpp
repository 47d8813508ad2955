#pragma once

#include "larsen/pipeline.hpp"
#include "larsen/types.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace larsen {

// What to run: a dataset, a distractor profile, a method list and a number of
// repeated runs.  Every run reshuffles the split and redraws the distractors
// from seeds derived from `seed`, and all methods within a run share the same
// data, so comparisons are paired.
struct ExperimentSpec {
  std::string dataset;  // "two-sines" or a csv path
  std::string target_column = "target";
  std::string noise = "none";  // none | seven | ten | custom
  std::vector<double> custom_sigmas;
  std::vector<std::string> methods = {"elm", "gasen-elm", "larsen-elm"};
  int runs = 5;
  std::uint64_t seed = 0;
  Index n_train = 0;  // csv datasets; 0 means 70% of the rows
  Index synth_train = 2001;
  Index synth_test = 20001;
  double synth_lo = 0.0;
  double synth_hi = 12.566370614359172;  // 4 pi
  LarsenConfig pipeline;

  void validate() const;
};

struct RunRecord {
  int run = 0;
  std::uint64_t seed = 0;
  double test_mse = 0.0;
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
  std::vector<int> selected_variables;  // variable-filtering methods only
  std::vector<int> noise_columns;       // distractor positions in this run's data
  std::vector<int> selected_members;    // ensemble methods only
  std::vector<double> ga_trace;         // ensemble methods only
  bool failed = false;
  std::string error;
};

struct MethodSummary {
  std::string method;
  std::vector<RunRecord> runs;
  double mean_mse = 0.0;
  double sd_mse = 0.0;
  double mean_fit_seconds = 0.0;
  double mean_predict_seconds = 0.0;
  int failures = 0;
};

struct ExperimentReport {
  int schema_version = 1;
  nlohmann::json spec;  // echo of the spec that produced the report
  std::string dataset_name;
  Index train_rows = 0;
  Index test_rows = 0;
  Index input_dim = 0;
  std::vector<MethodSummary> methods;
};

nlohmann::json spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const nlohmann::json& j);

// Runs every (run, method) cell.  A cell that throws is recorded as failed
// and excluded from the aggregates instead of aborting the experiment.
ExperimentReport run_experiment(const ExperimentSpec& spec);

// Reports serialize with sorted keys, so identical results give identical
// bytes.  Wall-clock timings go into a separate "timings" block that
// `include_timings = false` drops; everything else is deterministic in the
// spec seed.
nlohmann::json report_to_json(const ExperimentReport& report, bool include_timings);
ExperimentReport report_from_json(const nlohmann::json& j);

// One row per (method, run).
std::string report_csv(const ExperimentReport& report);

// Per-generation GA fitness rows for the ensemble methods.
std::string ga_trace_csv(const ExperimentReport& report);

// Human-readable summary table with improvement over the plain elm baseline.
std::string render_report(const ExperimentReport& report);

}  // namespace larsen
