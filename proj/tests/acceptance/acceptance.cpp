// End-to-end acceptance gate.  Each criterion prints exactly one [PASS] or
// [FAIL] line with its wall time and a short measurement summary; the process
// exit code is the number of failed criteria.

#include "larsen/bench.hpp"
#include "larsen/data.hpp"
#include "larsen/gasen.hpp"
#include "larsen/mrsr.hpp"
#include "larsen/numerics.hpp"
#include "larsen/pipeline.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace larsen;

namespace {

const std::string kDataDir = LARSEN_DATA_DIR;
const std::string kCliPath = LARSEN_CLI_PATH;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Shared state: later criteria audit the reports produced by earlier ones.
struct Context {
  ExperimentReport synth_report;
  ExperimentReport housing_report;
  bool have_synth = false;
  bool have_housing = false;
  std::vector<std::vector<double>> ga_traces;
};

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------------------
// C1: the pseudoinverse satisfies all four Penrose conditions on a random
// battery of shapes, including rank-deficient and badly scaled matrices.

double penrose_residual(const Matrix& a, const Matrix& p) {
  const double na = std::max(1.0, a.norm());
  const double np = std::max(1.0, p.norm());
  const Matrix ap = a * p;
  const Matrix pa = p * a;
  double worst = (a * pa - a).norm() / na;
  worst = std::max(worst, (p * ap - p).norm() / np);
  worst = std::max(worst, (ap - Matrix(ap.transpose())).norm() / std::max(1.0, ap.norm()));
  worst = std::max(worst, (pa - Matrix(pa.transpose())).norm() / std::max(1.0, pa.norm()));
  return worst;
}

Outcome check_pseudoinverse() {
  Rng rng(20260822);
  double worst = 0.0;
  int count = 0;

  // Edge shapes first.
  std::vector<Matrix> cases;
  cases.push_back(Matrix::Zero(3, 4));
  cases.push_back(Matrix::Constant(1, 1, 2.5));
  cases.push_back(Matrix::Ones(6, 1));
  cases.push_back(Matrix::Ones(1, 6));

  for (int k = 0; k < 96; ++k) {
    const Index m = 1 + static_cast<Index>(rng.below(50));
    const Index n = 1 + static_cast<Index>(rng.below(50));
    Matrix a(m, n);
    if (k % 3 == 1) {
      // Exactly rank deficient by construction.
      const Index r = 1 + static_cast<Index>(rng.below(
          static_cast<std::size_t>(std::max<Index>(1, std::min(m, n) - 1))));
      Matrix b(m, r);
      Matrix c(r, n);
      for (Index i = 0; i < m * r; ++i) {
        b(i / r, i % r) = rng.gaussian(0.0, 1.0);
      }
      for (Index i = 0; i < r * n; ++i) {
        c(i / n, i % n) = rng.gaussian(0.0, 1.0);
      }
      a = b * c;
    } else {
      double scale = 1.0;
      if (k % 3 == 2) {
        scale = std::pow(10.0, static_cast<double>(rng.below(13)) - 6.0);
      }
      for (Index i = 0; i < m; ++i) {
        for (Index j = 0; j < n; ++j) {
          a(i, j) = scale * rng.gaussian(0.0, 1.0);
        }
      }
    }
    cases.push_back(std::move(a));
  }

  for (const Matrix& a : cases) {
    const Matrix p = pseudoinverse(a);
    worst = std::max(worst, penrose_residual(a, p));
    ++count;
  }

  Outcome out;
  out.pass = count == 100 && worst <= 1e-8;
  out.detail = fmt("%d matrices, worst residual %.2e (limit 1e-08)", count, worst);
  return out;
}

// ---------------------------------------------------------------------------
// C2: a 50-unit network trained on 200 clean sine samples fits train and an
// unseen grid to stated accuracy.

Outcome check_sine_fit() {
  Rng rng(55);
  const Index n = 200;
  Matrix x(n, 1);
  Matrix t(n, 1);
  for (Index i = 0; i < n; ++i) {
    x(i, 0) = rng.uniform(-std::numbers::pi, std::numbers::pi);
    t(i, 0) = std::sin(x(i, 0));
  }
  ElmConfig config;
  config.hidden_count = 50;
  config.seed = 12;
  const ElmModel model = elm_train(x, t, config);
  const double train_mse =
      (elm_predict(model, x) - t).squaredNorm() / static_cast<double>(n);

  Matrix gx(2001, 1);
  Matrix gt(2001, 1);
  for (Index i = 0; i < 2001; ++i) {
    gx(i, 0) = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i) / 2000.0;
    gt(i, 0) = std::sin(gx(i, 0));
  }
  const double test_mse =
      (elm_predict(model, gx) - gt).squaredNorm() / 2001.0;

  Outcome out;
  out.pass = train_mse < 1e-4 && test_mse < 1e-3;
  out.detail = fmt("train mse %.2e (limit 1e-04), grid mse %.2e (limit 1e-03)",
                   train_mse, test_mse);
  return out;
}

// ---------------------------------------------------------------------------
// C3: on random multi-target problems the forward path keeps every step size
// in [0, 1], holds the active-set correlations equal (and maximal) after each
// step, and ends at the minimum-norm least squares solution.

Outcome check_forward_path() {
  Rng rng(31);
  int paths = 0;
  int steps = 0;
  double worst_equal = 0.0;
  double worst_lead = 0.0;
  double worst_end = 0.0;
  bool gamma_ok = true;

  for (int inst = 0; inst < 50; ++inst) {
    const Index n = 20 + static_cast<Index>(rng.below(41));
    const Index m = 2 + static_cast<Index>(rng.below(7));
    const Index p = 1 + static_cast<Index>(rng.below(3));
    Matrix x(n, m);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < m; ++j) {
        x(i, j) = rng.gaussian(0.0, 1.0);
      }
    }
    Matrix w(m, p);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < p; ++j) {
        w(i, j) = rng.gaussian(0.0, 1.0);
      }
    }
    Matrix t = x * w;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < p; ++j) {
        t(i, j) += rng.gaussian(0.0, 0.1);
      }
    }

    const LarsPath path = mrsr_path(x, t);
    ++paths;

    // Rebuild the standardized coordinates the path reports its weights in.
    Matrix xs = x.rowwise() - path.x_mean.transpose();
    for (Index j = 0; j < m; ++j) {
      xs.col(j) /= path.x_scale(j);
    }
    const Matrix ts = t.rowwise() - path.t_mean.transpose();

    for (const LarsStep& step : path.steps) {
      ++steps;
      if (!(step.gamma >= 0.0 && step.gamma <= 1.0)) {
        gamma_ok = false;
      }
      const Vector c = cumulative_correlation(ts - xs * step.weights, xs);
      double active_max = 0.0;
      double active_min = std::numeric_limits<double>::infinity();
      for (int j : step.active) {
        active_max = std::max(active_max, c(j));
        active_min = std::min(active_min, c(j));
      }
      const double scale = std::max(1.0, active_max);
      worst_equal = std::max(worst_equal, (active_max - active_min) / scale);
      std::set<int> active(step.active.begin(), step.active.end());
      for (Index j = 0; j < m; ++j) {
        if (active.count(static_cast<int>(j)) == 0) {
          worst_lead = std::max(worst_lead, (c(j) - active_max) / scale);
        }
      }
    }

    const Matrix end = path.steps.back().weights;
    const Matrix ols = lstsq(xs, ts);
    worst_end = std::max(worst_end, (end - ols).norm() / std::max(1.0, ols.norm()));
  }

  Outcome out;
  out.pass = paths == 50 && gamma_ok && worst_equal <= 1e-8 && worst_lead <= 1e-8 &&
             worst_end <= 1e-6;
  out.detail = fmt(
      "%d paths, %d steps; correlation spread %.1e, inactive lead %.1e "
      "(limits 1e-08), endpoint gap %.1e (limit 1e-06), step sizes %s",
      paths, steps, worst_equal, worst_lead, worst_end,
      gamma_ok ? "all in [0,1]" : "OUT OF RANGE");
  return out;
}

// ---------------------------------------------------------------------------
// C4: on ensembles with a known error correlation matrix, the closed-form
// weights match a dense simplex grid scan and the evolved weights come within
// five percent of the analytic ensemble error.

Outcome check_weight_optimum(Context& ctx) {
  Rng rng(404);
  const int n = 300;
  int instances = 0;
  double worst_coord = 0.0;
  double worst_ratio = 0.0;

  while (instances < 20) {
    // Random SPD target correlation with a safely interior optimum.
    Matrix a(3, 3);
    for (Index i = 0; i < 3; ++i) {
      for (Index j = 0; j < 3; ++j) {
        a(i, j) = rng.gaussian(0.0, 1.0);
      }
    }
    const Matrix m = a * a.transpose() + 0.3 * Matrix::Identity(3, 3);
    const ClosedFormWeights probe = optimal_weights_closed_form(m);
    if (probe.ill_conditioned || probe.weights.minCoeff() < 0.08) {
      continue;
    }
    ++instances;

    // Error columns whose empirical correlation is exactly m: take three
    // orthonormal columns scaled by sqrt(n) and mix them with the Cholesky
    // factor, so (1/n) E'E = L L' = m.
    Matrix z(n, 3);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < 3; ++j) {
        z(i, j) = rng.gaussian(0.0, 1.0);
      }
    }
    Eigen::HouseholderQR<Matrix> qr(z);
    const Matrix q = Matrix(qr.householderQ()).leftCols(3) * std::sqrt(static_cast<double>(n));
    const Matrix l = Eigen::LLT<Matrix>(m).matrixL();
    const Matrix e = q * l.transpose();

    std::vector<Matrix> predictions;
    for (Index j = 0; j < 3; ++j) {
      predictions.push_back(e.col(j));
    }
    const Matrix targets = Matrix::Zero(n, 1);
    const Matrix c = correlation_matrix(predictions, targets);

    const ClosedFormWeights cf = optimal_weights_closed_form(c);
    const double cf_error = ensemble_error(cf.weights, m);

    // Dense scan of the probability simplex at 0.01 resolution.
    Vector best_grid = Vector::Zero(3);
    double best_err = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 100; ++i) {
      for (int j = 0; j <= 100 - i; ++j) {
        Vector wv(3);
        wv << i / 100.0, j / 100.0, (100 - i - j) / 100.0;
        const double err = ensemble_error(wv, m);
        if (err < best_err) {
          best_err = err;
          best_grid = wv;
        }
      }
    }

    worst_coord = std::max(worst_coord, (cf.weights - best_grid).cwiseAbs().maxCoeff());

    GaConfig ga;
    ga.population = 24;
    ga.generations = 80;
    ga.seed = derive_seed(404, static_cast<std::uint64_t>(instances));
    const GasenResult evolved = gasen_select_predictions(predictions, targets, 0.05, ga);
    const double ga_error = ensemble_error(evolved.weights, m);
    worst_ratio = std::max(worst_ratio, ga_error / cf_error);
    ctx.ga_traces.push_back(evolved.ga_trace);
  }

  Outcome out;
  out.pass = worst_coord <= 0.02 && worst_ratio <= 1.05;
  out.detail = fmt(
      "%d ensembles; closed form vs grid scan %.3f per coordinate (limit 0.02), "
      "evolved error within %.1f%% of analytic optimum (limit 5%%)",
      instances, worst_coord, 100.0 * (worst_ratio - 1.0));
  return out;
}

// ---------------------------------------------------------------------------
// C5: with one sigma-2 distractor next to the clean synthetic signal, the
// full pipeline beats the single network in every run and drops the
// distractor in nearly all of them.

Outcome check_synthetic_filtering(Context& ctx) {
  ExperimentSpec spec;
  spec.dataset = "two-sines";
  spec.noise = "custom";
  spec.custom_sigmas = {2.0};
  spec.methods = {"elm", "larsen-elm"};
  spec.runs = 5;
  spec.seed = 1;
  spec.synth_train = 2001;
  spec.synth_test = 20001;
  const ExperimentReport report = run_experiment(spec);
  ctx.synth_report = report;
  ctx.have_synth = true;

  const MethodSummary& elm = report.methods[0];
  const MethodSummary& larsen = report.methods[1];
  int wins = 0;
  int clean_runs = 0;
  for (int r = 0; r < 5; ++r) {
    const RunRecord& le = larsen.runs[static_cast<std::size_t>(r)];
    const RunRecord& se = elm.runs[static_cast<std::size_t>(r)];
    if (le.failed || se.failed) {
      continue;
    }
    if (le.test_mse < se.test_mse) {
      ++wins;
    }
    bool selected_noise = false;
    for (int v : le.selected_variables) {
      if (std::find(le.noise_columns.begin(), le.noise_columns.end(), v) !=
          le.noise_columns.end()) {
        selected_noise = true;
      }
    }
    if (!selected_noise) {
      ++clean_runs;
    }
    ctx.ga_traces.push_back(le.ga_trace);
  }

  Outcome out;
  out.pass = wins == 5 && clean_runs >= 4;
  out.detail = fmt(
      "pipeline beat the single network in %d/5 runs (need 5), distractor "
      "excluded in %d/5 (need >= 4); mean mse %.3g vs %.3g",
      wins, clean_runs, larsen.mean_mse, elm.mean_mse);
  return out;
}

// ---------------------------------------------------------------------------
// C6: on the housing table with seven planted distractors the three methods
// order as full pipeline < ensemble-only < single network, and the pipeline
// improves on the single network by at least fifteen percent.

Outcome check_housing_benchmark(Context& ctx) {
  ExperimentSpec spec;
  spec.dataset = kDataDir + "/boston_housing.csv";
  spec.target_column = "medv";
  spec.noise = "seven";
  spec.methods = {"elm", "gasen-elm", "larsen-elm"};
  spec.runs = 5;
  spec.seed = 1;
  spec.n_train = 400;
  const ExperimentReport report = run_experiment(spec);
  ctx.housing_report = report;
  ctx.have_housing = true;

  const MethodSummary& elm = report.methods[0];
  const MethodSummary& gasen = report.methods[1];
  const MethodSummary& larsen = report.methods[2];
  for (const MethodSummary& s : report.methods) {
    for (const RunRecord& r : s.runs) {
      if (!r.failed && !r.ga_trace.empty()) {
        ctx.ga_traces.push_back(r.ga_trace);
      }
    }
  }

  const int failures = elm.failures + gasen.failures + larsen.failures;
  const double improvement =
      elm.mean_mse > 0.0 ? (elm.mean_mse - larsen.mean_mse) / elm.mean_mse : 0.0;
  Outcome out;
  out.pass = failures == 0 && larsen.mean_mse < gasen.mean_mse &&
             gasen.mean_mse < elm.mean_mse && improvement >= 0.15;
  out.detail = fmt(
      "mean mse %.2f < %.2f < %.2f, pipeline improvement %.1f%% (need >= 15%%), "
      "%d failed cells",
      larsen.mean_mse, gasen.mean_mse, elm.mean_mse, 100.0 * improvement, failures);
  return out;
}

// ---------------------------------------------------------------------------
// C7: pooled over the housing runs, at least eighty percent of the variables
// the pipeline keeps are original columns rather than planted distractors.

Outcome check_original_preference(const Context& ctx) {
  Outcome out;
  if (!ctx.have_housing) {
    out.detail = "housing benchmark did not run";
    return out;
  }
  int kept = 0;
  int kept_original = 0;
  for (const MethodSummary& s : ctx.housing_report.methods) {
    if (s.method != "larsen-elm") {
      continue;
    }
    for (const RunRecord& r : s.runs) {
      if (r.failed) {
        continue;
      }
      for (int v : r.selected_variables) {
        ++kept;
        if (std::find(r.noise_columns.begin(), r.noise_columns.end(), v) ==
            r.noise_columns.end()) {
          ++kept_original;
        }
      }
    }
  }
  const double fraction = kept > 0 ? static_cast<double>(kept_original) / kept : 0.0;
  out.pass = kept > 0 && fraction >= 0.80;
  out.detail = fmt("%d/%d kept variables are original columns (%.0f%%, need >= 80%%)",
                   kept_original, kept, 100.0 * fraction);
  return out;
}

// ---------------------------------------------------------------------------
// C8: bootstrap bags of 10000 rows leave out a fraction close to (1-1/n)^n
// for twenty independent seeds.

Outcome check_bag_fraction() {
  const Index n = 10000;
  double lo = 1.0;
  double hi = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Rng rng(derive_seed(2026, s));
    const std::vector<Index> bag = bag_sample(n, rng);
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (Index i : bag) {
      seen[static_cast<std::size_t>(i)] = true;
    }
    const double oob = static_cast<double>(std::count(seen.begin(), seen.end(), false)) /
                       static_cast<double>(n);
    lo = std::min(lo, oob);
    hi = std::max(hi, oob);
  }
  Outcome out;
  out.pass = lo >= 0.355 && hi <= 0.381;
  out.detail = fmt("20 bags of 10000, out-of-bag fraction in [%.4f, %.4f] "
                   "(required [0.355, 0.381])", lo, hi);
  return out;
}

// ---------------------------------------------------------------------------
// C9: the command line tool writes byte-identical reports across reruns in
// deterministic mode, and records positive wall-clock timings otherwise.

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome check_cli_reproducibility() {
  const std::string base =
      "\"" + kCliPath + "\" synth --train-points 501 --test-points 501 "
      "--noise-sigma 2 --runs 2 --seed 9 --hidden 30 --members 8 "
      "--population 16 --generations 30 --quiet";
  const std::string file_a = "acceptance_run_a.json";
  const std::string file_b = "acceptance_run_b.json";
  const std::string file_t = "acceptance_run_t.json";

  Outcome out;
  const int rc_a =
      std::system((base + " --deterministic-json --out " + file_a).c_str());
  const int rc_b =
      std::system((base + " --deterministic-json --out " + file_b).c_str());
  const int rc_t = std::system((base + " --out " + file_t).c_str());
  if (rc_a != 0 || rc_b != 0 || rc_t != 0) {
    out.detail = fmt("tool exited with %d/%d/%d", rc_a, rc_b, rc_t);
    return out;
  }

  const std::string bytes_a = slurp(file_a);
  const std::string bytes_b = slurp(file_b);
  const bool identical = !bytes_a.empty() && bytes_a == bytes_b;

  bool timings_ok = false;
  double mean_fit = 0.0;
  try {
    const nlohmann::json timed = nlohmann::json::parse(slurp(file_t));
    if (timed.contains("timings")) {
      mean_fit = timed["timings"].at(0).at("mean_fit_seconds").get<double>();
      timings_ok = mean_fit > 0.0;
    }
  } catch (const std::exception&) {
    timings_ok = false;
  }

  std::remove(file_a.c_str());
  std::remove(file_b.c_str());
  std::remove(file_t.c_str());

  out.pass = identical && timings_ok;
  out.detail = fmt("%zu-byte reports %s across reruns; timed run recorded "
                   "mean fit %.4fs",
                   bytes_a.size(), identical ? "identical" : "DIFFER", mean_fit);
  return out;
}

// ---------------------------------------------------------------------------
// C10: every fitness trace gathered above is non-decreasing, generation over
// generation.

Outcome check_trace_monotonicity(const Context& ctx) {
  int traces = 0;
  int violations = 0;
  for (const std::vector<double>& trace : ctx.ga_traces) {
    ++traces;
    for (std::size_t g = 1; g < trace.size(); ++g) {
      if (trace[g] < trace[g - 1]) {
        ++violations;
      }
    }
  }
  Outcome out;
  out.pass = traces >= 30 && violations == 0;
  out.detail = fmt("%d traces audited, %d regressions", traces, violations);
  return out;
}

}  // namespace

int main() {
  Context ctx;
  struct Criterion {
    const char* id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };

  const std::vector<Criterion> criteria = {
      {"C1", "pseudoinverse satisfies the four Penrose conditions", 5.0,
       [] { return check_pseudoinverse(); }},
      {"C2", "a 50-unit network fits a clean sine", 1.0,
       [] { return check_sine_fit(); }},
      {"C3", "forward path: step sizes, equal correlations, least squares endpoint", 10.0,
       [] { return check_forward_path(); }},
      {"C4", "evolved ensemble weights track the analytic optimum", 30.0,
       [&ctx] { return check_weight_optimum(ctx); }},
      {"C5", "distractor column is filtered and accuracy improves", 60.0,
       [&ctx] { return check_synthetic_filtering(ctx); }},
      {"C6", "housing benchmark orders the methods and improves 15 percent", 180.0,
       [&ctx] { return check_housing_benchmark(ctx); }},
      {"C7", "variable selection prefers original columns", 5.0,
       [&ctx] { return check_original_preference(ctx); }},
      {"C8", "bootstrap bags leave the expected fraction out", 5.0,
       [] { return check_bag_fraction(); }},
      {"C9", "command line reports reproduce byte for byte", 60.0,
       [] { return check_cli_reproducibility(); }},
      {"C10", "fitness traces never regress", 5.0,
       [&ctx] { return check_trace_monotonicity(ctx); }},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = elapsed <= c.budget_seconds;
    const bool pass = out.pass && in_budget;
    std::printf("[%s] %s %s (%.2fs, budget %.0fs): %s%s\n", pass ? "PASS" : "FAIL",
                c.id, c.name, elapsed, c.budget_seconds, out.detail.c_str(),
                in_budget ? "" : " [OVER TIME BUDGET]");
    std::fflush(stdout);
    if (!pass) {
      ++failures;
    }
  }

  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures;
}
