#include "larsen/bench.hpp"

#include "larsen/data.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace larsen {

namespace {

const std::vector<std::string> kKnownMethods = {"elm", "gasen-elm", "larsen-elm"};

bool known_method(const std::string& m) {
  return std::find(kKnownMethods.begin(), kKnownMethods.end(), m) != kKnownMethods.end();
}

}  // namespace

void ExperimentSpec::validate() const {
  if (dataset.empty()) {
    throw ContractViolation("ExperimentSpec: dataset is empty");
  }
  if (runs < 1) {
    throw ContractViolation("ExperimentSpec: runs must be >= 1");
  }
  if (methods.empty()) {
    throw ContractViolation("ExperimentSpec: no methods requested");
  }
  for (const auto& m : methods) {
    if (!known_method(m)) {
      throw ContractViolation("ExperimentSpec: unknown method '" + m +
                              "' (known: elm, gasen-elm, larsen-elm)");
    }
  }
  if (noise != "none" && noise != "seven" && noise != "ten" && noise != "custom") {
    throw ContractViolation("ExperimentSpec: noise must be none, seven, ten or custom");
  }
  if (noise == "custom" && custom_sigmas.empty()) {
    throw ContractViolation("ExperimentSpec: custom noise needs at least one sigma");
  }
  for (double s : custom_sigmas) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ContractViolation("ExperimentSpec: sigmas must be positive and finite");
    }
  }
  if (dataset == "two-sines") {
    if (synth_train < 4 || synth_test < 1) {
      throw ContractViolation("ExperimentSpec: synthetic sizes too small");
    }
    if (!(synth_lo < synth_hi)) {
      throw ContractViolation("ExperimentSpec: bad synthetic interval");
    }
  } else if (n_train < 0) {
    throw ContractViolation("ExperimentSpec: n_train must be nonnegative");
  }
  pipeline.validate();
}

namespace {

// Substream tags per run: distractor draws, the split shuffle, then one
// model stream per method index.
constexpr std::uint64_t kNoiseStream = 11;
constexpr std::uint64_t kSplitStream = 13;
constexpr std::uint64_t kMethodBase = 100;

std::vector<double> resolve_sigmas(const ExperimentSpec& spec) {
  if (spec.noise == "seven") return seven_sigmas();
  if (spec.noise == "ten") return ten_sigmas();
  if (spec.noise == "custom") return spec.custom_sigmas;
  return {};
}

Dataset vconcat(const Dataset& a, const Dataset& b) {
  Dataset out = a;
  out.x.resize(a.x.rows() + b.x.rows(), a.x.cols());
  out.x.topRows(a.x.rows()) = a.x;
  out.x.bottomRows(b.x.rows()) = b.x;
  out.y.resize(a.y.rows() + b.y.rows(), 1);
  out.y.topRows(a.y.rows()) = a.y;
  out.y.bottomRows(b.y.rows()) = b.y;
  return out;
}

StandardizedPair build_run_data(const ExperimentSpec& spec,
                                const std::vector<double>& sigmas,
                                std::uint64_t run_seed) {
  const NoiseProfile profile{sigmas, derive_seed(run_seed, kNoiseStream)};
  if (spec.dataset == "two-sines") {
    // Distractors are drawn over train and test in one pass so both sides get
    // the same column layout with independent values.
    const Dataset train_clean =
        gen_two_sines(spec.synth_train, spec.synth_lo, spec.synth_hi, {});
    const Dataset test_clean =
        gen_two_sines(spec.synth_test, spec.synth_lo, spec.synth_hi, {});
    const Dataset blended = blend_noise(vconcat(train_clean, test_clean), profile);
    auto [train, test] = split_at(blended, spec.synth_train);
    return standardize(train, test);
  }
  const Dataset raw = load_csv(spec.dataset, spec.target_column);
  const Dataset blended = blend_noise(raw, profile);
  Index n_train = spec.n_train;
  if (n_train == 0) {
    n_train = static_cast<Index>(std::llround(0.7 * static_cast<double>(blended.x.rows())));
  }
  auto [train, test] = split(blended, n_train, derive_seed(run_seed, kSplitStream));
  return standardize(train, test);
}

double mse(const Matrix& pred, const Matrix& truth) {
  return (pred - truth).squaredNorm() / static_cast<double>(truth.size());
}

RunRecord run_cell(const ExperimentSpec& spec, const std::string& method,
                   std::size_t method_idx, int run, std::uint64_t run_seed,
                   const StandardizedPair& data) {
  RunRecord rec;
  rec.run = run;
  rec.seed = derive_seed(run_seed, kMethodBase + method_idx);
  for (std::size_t j = 0; j < data.train.noise_mask.size(); ++j) {
    if (data.train.noise_mask[j]) {
      rec.noise_columns.push_back(static_cast<int>(j));
    }
  }

  using clock = std::chrono::steady_clock;
  if (method == "elm") {
    ElmConfig config = spec.pipeline.elm;
    config.seed = rec.seed;
    const auto t0 = clock::now();
    const ElmModel model = elm_train(data.train.x, data.train.y, config);
    const auto t1 = clock::now();
    const Matrix pred = elm_predict(model, data.test.x);
    const auto t2 = clock::now();
    rec.test_mse = mse(pred, data.test.y);
    rec.fit_seconds = std::chrono::duration<double>(t1 - t0).count();
    rec.predict_seconds = std::chrono::duration<double>(t2 - t1).count();
    return rec;
  }

  LarsenConfig config = spec.pipeline;
  config.lars_enabled = (method == "larsen-elm");
  config.seed = rec.seed;
  const auto t0 = clock::now();
  const EnsembleModel model = larsen_fit(data.train.x, data.train.y, config);
  const auto t1 = clock::now();
  const Matrix pred = larsen_predict(model, data.test.x);
  const auto t2 = clock::now();
  rec.test_mse = mse(pred, data.test.y);
  rec.fit_seconds = std::chrono::duration<double>(t1 - t0).count();
  rec.predict_seconds = std::chrono::duration<double>(t2 - t1).count();
  if (config.lars_enabled) {
    rec.selected_variables = model.selection.kept;
  }
  rec.selected_members = model.gasen.selected;
  rec.ga_trace = model.gasen.ga_trace;
  return rec;
}

void summarize(MethodSummary& s) {
  double sum = 0.0;
  double fit = 0.0;
  double pred = 0.0;
  int ok = 0;
  for (const RunRecord& r : s.runs) {
    if (r.failed) {
      ++s.failures;
      continue;
    }
    sum += r.test_mse;
    fit += r.fit_seconds;
    pred += r.predict_seconds;
    ++ok;
  }
  if (ok == 0) {
    return;
  }
  s.mean_mse = sum / ok;
  s.mean_fit_seconds = fit / ok;
  s.mean_predict_seconds = pred / ok;
  if (ok > 1) {
    double acc = 0.0;
    for (const RunRecord& r : s.runs) {
      if (!r.failed) {
        acc += (r.test_mse - s.mean_mse) * (r.test_mse - s.mean_mse);
      }
    }
    s.sd_mse = std::sqrt(acc / (ok - 1));
  }
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const std::vector<double> sigmas = resolve_sigmas(spec);

  ExperimentReport report;
  report.spec = spec_to_json(spec);
  report.methods.resize(spec.methods.size());
  for (std::size_t m = 0; m < spec.methods.size(); ++m) {
    report.methods[m].method = spec.methods[m];
  }

  for (int run = 0; run < spec.runs; ++run) {
    const std::uint64_t run_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(run));
    StandardizedPair data;
    bool data_ok = true;
    try {
      data = build_run_data(spec, sigmas, run_seed);
      if (run == 0) {
        report.dataset_name = data.train.name;
        report.train_rows = data.train.x.rows();
        report.test_rows = data.test.x.rows();
        report.input_dim = data.train.x.cols();
      }
    } catch (const std::exception& e) {
      data_ok = false;
      std::fprintf(stderr, "run %d: data construction failed: %s\n", run, e.what());
      for (std::size_t m = 0; m < spec.methods.size(); ++m) {
        RunRecord rec;
        rec.run = run;
        rec.failed = true;
        rec.error = std::string("data: ") + e.what();
        report.methods[m].runs.push_back(std::move(rec));
      }
    }
    if (!data_ok) {
      continue;
    }
    for (std::size_t m = 0; m < spec.methods.size(); ++m) {
      try {
        report.methods[m].runs.push_back(
            run_cell(spec, spec.methods[m], m, run, run_seed, data));
      } catch (const std::exception& e) {
        std::fprintf(stderr, "run %d method %s failed: %s\n", run,
                     spec.methods[m].c_str(), e.what());
        RunRecord rec;
        rec.run = run;
        rec.seed = derive_seed(run_seed, kMethodBase + m);
        rec.failed = true;
        rec.error = e.what();
        report.methods[m].runs.push_back(std::move(rec));
      }
    }
  }

  for (MethodSummary& s : report.methods) {
    summarize(s);
  }
  return report;
}

nlohmann::json spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  j["dataset"] = spec.dataset;
  j["target_column"] = spec.target_column;
  j["noise"] = spec.noise;
  j["custom_sigmas"] = spec.custom_sigmas;
  j["methods"] = spec.methods;
  j["runs"] = spec.runs;
  j["seed"] = spec.seed;
  j["n_train"] = spec.n_train;
  j["synth_train"] = spec.synth_train;
  j["synth_test"] = spec.synth_test;
  j["synth_lo"] = spec.synth_lo;
  j["synth_hi"] = spec.synth_hi;
  j["pipeline"]["members"] = spec.pipeline.members;
  j["pipeline"]["lambda"] = spec.pipeline.lambda;
  j["pipeline"]["val_fraction"] = spec.pipeline.val_fraction;
  j["pipeline"]["elm"]["hidden_count"] = spec.pipeline.elm.hidden_count;
  j["pipeline"]["elm"]["activation"] = to_string(spec.pipeline.elm.activation);
  j["pipeline"]["elm"]["input_weight_min"] = spec.pipeline.elm.input_weight_min;
  j["pipeline"]["elm"]["input_weight_max"] = spec.pipeline.elm.input_weight_max;
  j["pipeline"]["elm"]["bias_min"] = spec.pipeline.elm.bias_min;
  j["pipeline"]["elm"]["bias_max"] = spec.pipeline.elm.bias_max;
  j["pipeline"]["ga"]["population"] = spec.pipeline.ga.population;
  j["pipeline"]["ga"]["generations"] = spec.pipeline.ga.generations;
  j["pipeline"]["ga"]["crossover_fraction"] = spec.pipeline.ga.crossover_fraction;
  j["pipeline"]["ga"]["mutation_rate"] = spec.pipeline.ga.mutation_rate;
  j["pipeline"]["ga"]["elitism"] = spec.pipeline.ga.elitism;
  return j;
}

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  spec.dataset = j.at("dataset").get<std::string>();
  spec.target_column = j.at("target_column").get<std::string>();
  spec.noise = j.at("noise").get<std::string>();
  spec.custom_sigmas = j.at("custom_sigmas").get<std::vector<double>>();
  spec.methods = j.at("methods").get<std::vector<std::string>>();
  spec.runs = j.at("runs").get<int>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.n_train = j.at("n_train").get<Index>();
  spec.synth_train = j.at("synth_train").get<Index>();
  spec.synth_test = j.at("synth_test").get<Index>();
  spec.synth_lo = j.at("synth_lo").get<double>();
  spec.synth_hi = j.at("synth_hi").get<double>();
  const auto& p = j.at("pipeline");
  spec.pipeline.members = p.at("members").get<int>();
  spec.pipeline.lambda = p.at("lambda").get<double>();
  spec.pipeline.val_fraction = p.at("val_fraction").get<double>();
  const auto& e = p.at("elm");
  spec.pipeline.elm.hidden_count = e.at("hidden_count").get<int>();
  spec.pipeline.elm.activation = activation_from_string(e.at("activation").get<std::string>());
  spec.pipeline.elm.input_weight_min = e.at("input_weight_min").get<double>();
  spec.pipeline.elm.input_weight_max = e.at("input_weight_max").get<double>();
  spec.pipeline.elm.bias_min = e.at("bias_min").get<double>();
  spec.pipeline.elm.bias_max = e.at("bias_max").get<double>();
  const auto& g = p.at("ga");
  spec.pipeline.ga.population = g.at("population").get<int>();
  spec.pipeline.ga.generations = g.at("generations").get<int>();
  spec.pipeline.ga.crossover_fraction = g.at("crossover_fraction").get<double>();
  spec.pipeline.ga.mutation_rate = g.at("mutation_rate").get<double>();
  spec.pipeline.ga.elitism = g.at("elitism").get<int>();
  return spec;
}

nlohmann::json report_to_json(const ExperimentReport& report, bool include_timings) {
  nlohmann::json j;
  j["schema_version"] = report.schema_version;
  j["spec"] = report.spec;
  j["dataset"]["name"] = report.dataset_name;
  j["dataset"]["train_rows"] = report.train_rows;
  j["dataset"]["test_rows"] = report.test_rows;
  j["dataset"]["input_dim"] = report.input_dim;

  nlohmann::json methods = nlohmann::json::array();
  for (const MethodSummary& s : report.methods) {
    nlohmann::json mj;
    mj["method"] = s.method;
    mj["aggregates"]["mean_mse"] = s.mean_mse;
    mj["aggregates"]["sd_mse"] = s.sd_mse;
    mj["aggregates"]["failures"] = s.failures;
    nlohmann::json runs = nlohmann::json::array();
    for (const RunRecord& r : s.runs) {
      nlohmann::json rj;
      rj["run"] = r.run;
      rj["seed"] = r.seed;
      rj["test_mse"] = r.test_mse;
      rj["selected_variables"] = r.selected_variables;
      rj["noise_columns"] = r.noise_columns;
      rj["selected_members"] = r.selected_members;
      rj["ga_trace"] = r.ga_trace;
      rj["failed"] = r.failed;
      rj["error"] = r.error;
      runs.push_back(std::move(rj));
    }
    mj["runs"] = std::move(runs);
    methods.push_back(std::move(mj));
  }
  j["methods"] = std::move(methods);

  if (include_timings) {
    nlohmann::json tm = nlohmann::json::array();
    for (const MethodSummary& s : report.methods) {
      nlohmann::json mj;
      mj["method"] = s.method;
      mj["mean_fit_seconds"] = s.mean_fit_seconds;
      mj["mean_predict_seconds"] = s.mean_predict_seconds;
      nlohmann::json runs = nlohmann::json::array();
      for (const RunRecord& r : s.runs) {
        nlohmann::json rj;
        rj["fit_seconds"] = r.fit_seconds;
        rj["predict_seconds"] = r.predict_seconds;
        runs.push_back(std::move(rj));
      }
      mj["runs"] = std::move(runs);
      tm.push_back(std::move(mj));
    }
    j["timings"] = std::move(tm);
  }
  return j;
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport report;
  report.schema_version = j.at("schema_version").get<int>();
  if (report.schema_version != 1) {
    throw ContractViolation("report_from_json: unsupported schema_version " +
                            std::to_string(report.schema_version));
  }
  report.spec = j.at("spec");
  report.dataset_name = j.at("dataset").at("name").get<std::string>();
  report.train_rows = j.at("dataset").at("train_rows").get<Index>();
  report.test_rows = j.at("dataset").at("test_rows").get<Index>();
  report.input_dim = j.at("dataset").at("input_dim").get<Index>();

  for (const auto& mj : j.at("methods")) {
    MethodSummary s;
    s.method = mj.at("method").get<std::string>();
    s.mean_mse = mj.at("aggregates").at("mean_mse").get<double>();
    s.sd_mse = mj.at("aggregates").at("sd_mse").get<double>();
    s.failures = mj.at("aggregates").at("failures").get<int>();
    for (const auto& rj : mj.at("runs")) {
      RunRecord r;
      r.run = rj.at("run").get<int>();
      r.seed = rj.at("seed").get<std::uint64_t>();
      r.test_mse = rj.at("test_mse").get<double>();
      r.selected_variables = rj.at("selected_variables").get<std::vector<int>>();
      r.noise_columns = rj.at("noise_columns").get<std::vector<int>>();
      r.selected_members = rj.at("selected_members").get<std::vector<int>>();
      r.ga_trace = rj.at("ga_trace").get<std::vector<double>>();
      r.failed = rj.at("failed").get<bool>();
      r.error = rj.at("error").get<std::string>();
      s.runs.push_back(std::move(r));
    }
    report.methods.push_back(std::move(s));
  }

  if (j.contains("timings")) {
    for (const auto& mj : j.at("timings")) {
      const std::string method = mj.at("method").get<std::string>();
      for (MethodSummary& s : report.methods) {
        if (s.method != method) {
          continue;
        }
        s.mean_fit_seconds = mj.at("mean_fit_seconds").get<double>();
        s.mean_predict_seconds = mj.at("mean_predict_seconds").get<double>();
        const auto& runs = mj.at("runs");
        for (std::size_t i = 0; i < s.runs.size() && i < runs.size(); ++i) {
          s.runs[i].fit_seconds = runs.at(i).at("fit_seconds").get<double>();
          s.runs[i].predict_seconds = runs.at(i).at("predict_seconds").get<double>();
        }
      }
    }
  }
  return report;
}

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "dataset,method,run,seed,test_mse,fit_seconds,predict_seconds,"
         "n_selected_variables,n_selected_members,failed\n";
  char buf[64];
  for (const MethodSummary& s : report.methods) {
    for (const RunRecord& r : s.runs) {
      out << report.dataset_name << ',' << s.method << ',' << r.run << ',' << r.seed << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", r.test_mse);
      out << buf << ',';
      std::snprintf(buf, sizeof(buf), "%.6f", r.fit_seconds);
      out << buf << ',';
      std::snprintf(buf, sizeof(buf), "%.6f", r.predict_seconds);
      out << buf << ',';
      out << r.selected_variables.size() << ',' << r.selected_members.size() << ','
          << (r.failed ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

std::string ga_trace_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "method,run,generation,best_fitness\n";
  char buf[64];
  for (const MethodSummary& s : report.methods) {
    for (const RunRecord& r : s.runs) {
      for (std::size_t g = 0; g < r.ga_trace.size(); ++g) {
        std::snprintf(buf, sizeof(buf), "%.17g", r.ga_trace[g]);
        out << s.method << ',' << r.run << ',' << g << ',' << buf << '\n';
      }
    }
  }
  return out.str();
}

std::string render_report(const ExperimentReport& report) {
  std::ostringstream out;
  out << "dataset: " << report.dataset_name << " (train " << report.train_rows
      << ", test " << report.test_rows << ", inputs " << report.input_dim << ")\n";

  const MethodSummary* elm = nullptr;
  for (const MethodSummary& s : report.methods) {
    if (s.method == "elm" && s.failures < static_cast<int>(s.runs.size())) {
      elm = &s;
    }
  }

  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %12s %12s %10s %10s %10s %9s\n", "method",
                "mean mse", "sd mse", "vs elm", "fit s", "predict s", "failures");
  out << line;
  for (const MethodSummary& s : report.methods) {
    std::string vs = "--";
    if (elm != nullptr && s.method != "elm" && elm->mean_mse > 0.0 &&
        s.failures < static_cast<int>(s.runs.size())) {
      char b[32];
      std::snprintf(b, sizeof(b), "%+.1f%%",
                    100.0 * (elm->mean_mse - s.mean_mse) / elm->mean_mse);
      vs = b;
    }
    std::snprintf(line, sizeof(line), "%-12s %12.5g %12.5g %10s %10.3f %10.3f %9d\n",
                  s.method.c_str(), s.mean_mse, s.sd_mse, vs.c_str(), s.mean_fit_seconds,
                  s.mean_predict_seconds, s.failures);
    out << line;
  }
  return out.str();
}

}  // namespace larsen
