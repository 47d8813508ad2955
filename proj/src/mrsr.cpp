#include "larsen/mrsr.hpp"

#include "larsen/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace larsen {

namespace {

constexpr double kTieTol = 1e-10;
constexpr int kMaxTargets = 16;  // sign enumeration is 2^p

}  // namespace

Vector cumulative_correlation(const Matrix& residual, const Matrix& x) {
  require_finite(residual, "cumulative_correlation: residual");
  require_finite(x, "cumulative_correlation: x");
  if (residual.rows() != x.rows()) {
    throw ContractViolation("cumulative_correlation: row mismatch");
  }
  const Matrix prod = residual.transpose() * x;  // targets x regressors
  return prod.cwiseAbs().colwise().sum().transpose();
}

StepSize lars_step_size(double c_max, const Matrix& a, const Matrix& b,
                        const std::vector<int>& inactive) {
  if (!std::isfinite(c_max) || c_max < 0.0) {
    throw ContractViolation("lars_step_size: c_max must be finite and nonnegative");
  }
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ContractViolation("lars_step_size: a and b must have the same shape");
  }
  const Index p = a.rows();
  if (p < 1) {
    throw ContractViolation("lars_step_size: need at least one target row");
  }
  if (p > kMaxTargets) {
    throw ContractViolation("lars_step_size: more than " + std::to_string(kMaxTargets) +
                            " targets");
  }

  StepSize out;
  if (inactive.empty()) {
    return out;  // gamma = 1, nothing enters
  }

  std::vector<std::pair<double, int>> candidates;
  for (int j : inactive) {
    if (j < 0 || j >= a.cols()) {
      throw ContractViolation("lars_step_size: inactive index out of range");
    }
    double best_j = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << p); ++mask) {
      double sa = 0.0;
      double sb = 0.0;
      for (Index i = 0; i < p; ++i) {
        const double s = ((mask >> i) & 1u) ? 1.0 : -1.0;
        sa += s * a(i, j);
        sb += s * b(i, j);
      }
      const double den = c_max + sb;
      if (std::abs(den) < 1e-300) {
        continue;
      }
      double g = (c_max + sa) / den;
      if (g < -kTieTol || g > 1.0 + kTieTol) {
        continue;
      }
      g = std::clamp(g, 0.0, 1.0);
      best_j = std::min(best_j, g);
    }
    if (std::isfinite(best_j)) {
      candidates.emplace_back(best_j, j);
    }
  }
  if (candidates.empty()) {
    return out;  // numerically nothing crosses before gamma = 1
  }

  double gamma = 1.0;
  for (const auto& [g, j] : candidates) {
    gamma = std::min(gamma, g);
  }
  out.gamma = gamma;
  for (const auto& [g, j] : candidates) {
    if (g <= gamma + kTieTol) {
      out.entering.push_back(j);
    }
  }
  std::sort(out.entering.begin(), out.entering.end());
  return out;
}

LarsPath mrsr_path(const Matrix& x, const Matrix& t) {
  require_finite(x, "mrsr_path: x");
  require_finite(t, "mrsr_path: t");
  if (x.rows() != t.rows()) {
    throw ContractViolation("mrsr_path: x and t row counts differ");
  }
  const Index n = x.rows();
  const Index m = x.cols();
  const Index p = t.cols();
  if (n < 2) {
    throw ContractViolation("mrsr_path: need at least two rows");
  }
  if (m < 1 || p < 1) {
    throw ContractViolation("mrsr_path: need at least one regressor and one target");
  }
  if (p > kMaxTargets) {
    throw ContractViolation("mrsr_path: too many target columns");
  }

  LarsPath path;
  path.n_regressors = static_cast<int>(m);
  path.n_targets = static_cast<int>(p);
  path.x_mean = x.colwise().mean();
  path.t_mean = t.colwise().mean();
  path.x_scale = Vector::Ones(m);

  Matrix xs = x.rowwise() - path.x_mean.transpose();
  std::vector<int> included;
  for (Index j = 0; j < m; ++j) {
    const double sd = std::sqrt(xs.col(j).squaredNorm() / static_cast<double>(n - 1));
    if (sd <= 1e-12 * std::max(1.0, std::abs(path.x_mean(j)))) {
      path.excluded.push_back(static_cast<int>(j));
      xs.col(j).setZero();
    } else {
      path.x_scale(j) = sd;
      xs.col(j) /= sd;
      included.push_back(static_cast<int>(j));
    }
  }
  const Matrix ts = t.rowwise() - path.t_mean.transpose();

  if (included.empty()) {
    return path;  // nothing to rank; excluded carries the reason
  }

  Matrix y = Matrix::Zero(n, p);
  Matrix w = Matrix::Zero(m, p);
  std::vector<bool> active_mask(m, false);
  std::vector<int> active;
  std::vector<int> pending;

  const std::size_t max_iter = included.size() + 2;
  for (std::size_t iter = 0; active.size() < included.size(); ++iter) {
    if (iter >= max_iter) {
      throw NumericFailure("mrsr_path: no progress after " + std::to_string(iter) +
                           " steps");
    }

    const Matrix residual = ts - y;
    const Vector c = cumulative_correlation(residual, xs);
    double c_max = 0.0;
    for (int j : included) {
      c_max = std::max(c_max, c(j));
    }

    // New entrants: regressors flagged at the previous crossing plus anything
    // tied with the maximal correlation.  Ties join together.
    std::set<int> joiners(pending.begin(), pending.end());
    pending.clear();
    const double join_tol = kTieTol * std::max(1.0, c_max);
    for (int j : included) {
      if (!active_mask[j] && c(j) >= c_max - join_tol) {
        joiners.insert(j);
      }
    }
    if (joiners.empty()) {
      // Roundoff pushed every candidate below the tie window; take the best.
      int best = -1;
      for (int j : included) {
        if (!active_mask[j] && (best < 0 || c(j) > c(best))) {
          best = j;
        }
      }
      joiners.insert(best);
    }
    for (int j : joiners) {
      if (!active_mask[j]) {
        active_mask[j] = true;
        active.push_back(j);
        path.entry_order.push_back(j);
      }
    }
    std::sort(active.begin(), active.end());

    Matrix x_active(n, static_cast<Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) {
      x_active.col(static_cast<Index>(k)) = xs.col(active[k]);
    }
    const Matrix w_active = lstsq(x_active, ts);
    const Matrix y_bar = x_active * w_active;
    Matrix w_bar = Matrix::Zero(m, p);
    for (std::size_t k = 0; k < active.size(); ++k) {
      w_bar.row(active[k]) = w_active.row(static_cast<Index>(k));
    }

    std::vector<int> inactive;
    for (int j : included) {
      if (!active_mask[j]) {
        inactive.push_back(j);
      }
    }

    double gamma = 1.0;
    if (!inactive.empty()) {
      const Matrix a_corr = residual.transpose() * xs;
      const Matrix b_corr = (y_bar - y).transpose() * xs;
      const StepSize step = lars_step_size(c_max, a_corr, b_corr, inactive);
      gamma = step.gamma;
      pending = step.entering;
    }

    y += gamma * (y_bar - y);
    w = (1.0 - gamma) * w + gamma * w_bar;

    LarsStep step;
    step.gamma = gamma;
    step.c_max = c_max;
    step.active = active;
    step.weights = w;
    path.steps.push_back(std::move(step));
  }
  return path;
}

namespace {

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& idx,
                   std::size_t lo, std::size_t hi) {
  Matrix out(static_cast<Index>(hi - lo), m.cols());
  for (std::size_t i = lo; i < hi; ++i) {
    out.row(static_cast<Index>(i - lo)) = m.row(static_cast<Index>(idx[i]));
  }
  return out;
}

}  // namespace

VariableSelection select_variables(const Matrix& x, const Matrix& t,
                                   double val_fraction, std::uint64_t seed) {
  require_finite(x, "select_variables: x");
  require_finite(t, "select_variables: t");
  if (x.rows() != t.rows()) {
    throw ContractViolation("select_variables: x and t row counts differ");
  }
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw ContractViolation("select_variables: val_fraction must lie in (0, 1)");
  }
  const Index n = x.rows();
  if (n < 4) {
    throw ContractViolation("select_variables: need at least four rows to split");
  }

  const Index n_val = std::clamp<Index>(
      static_cast<Index>(std::llround(val_fraction * static_cast<double>(n))), 1, n - 2);
  const Index n_fit = n - n_val;

  Rng rng(seed);
  const std::vector<std::size_t> perm = rng.permutation(static_cast<std::size_t>(n));
  const Matrix x_fit = gather_rows(x, perm, 0, static_cast<std::size_t>(n_fit));
  const Matrix t_fit = gather_rows(t, perm, 0, static_cast<std::size_t>(n_fit));
  const Matrix x_val = gather_rows(x, perm, static_cast<std::size_t>(n_fit),
                                   static_cast<std::size_t>(n));
  const Matrix t_val = gather_rows(t, perm, static_cast<std::size_t>(n_fit),
                                   static_cast<std::size_t>(n));

  const LarsPath path = mrsr_path(x_fit, t_fit);

  VariableSelection sel;
  sel.ranked = path.entry_order;
  sel.excluded = path.excluded;
  if (path.steps.empty()) {
    throw ContractViolation("select_variables: every column is constant");
  }

  Matrix xv = x_val.rowwise() - path.x_mean.transpose();
  for (Index j = 0; j < xv.cols(); ++j) {
    xv.col(j) /= path.x_scale(j);
  }
  const double denom = static_cast<double>(t_val.rows() * t_val.cols());
  for (const LarsStep& step : path.steps) {
    Matrix pred = xv * step.weights;
    pred.rowwise() += path.t_mean.transpose();
    sel.k_values.push_back(static_cast<int>(step.active.size()));
    sel.val_mse.push_back((pred - t_val).squaredNorm() / denom);
  }

  std::size_t arg_min = 0;
  for (std::size_t s = 1; s < sel.val_mse.size(); ++s) {
    if (sel.val_mse[s] < sel.val_mse[arg_min]) {
      arg_min = s;
    }
  }
  const double min_mse = sel.val_mse[arg_min];

  // One-standard-error rule: the shortest prefix statistically as good as the
  // best one.  The spread of the per-entry squared errors at the minimum says
  // how much of the curve is holdout noise; a single split estimate is far too
  // jittery for a bare argmin, which tends to drag chance regressors in.
  Matrix best_pred = xv * path.steps[arg_min].weights;
  best_pred.rowwise() += path.t_mean.transpose();
  const Eigen::ArrayXXd sq = (best_pred - t_val).array().square();
  const double sq_var = (sq - min_mse).square().sum() / std::max(1.0, denom - 1.0);
  const Matrix t_val_centered = t_val.rowwise() - t_val.colwise().mean();
  const double var_t = t_val_centered.squaredNorm() / denom;
  const double tol = std::max(std::sqrt(sq_var / denom), 1e-12 * var_t);
  for (std::size_t s = 0; s < sel.val_mse.size(); ++s) {
    if (sel.val_mse[s] <= min_mse + tol) {
      sel.k_star = sel.k_values[s];
      break;
    }
  }
  sel.kept.assign(sel.ranked.begin(), sel.ranked.begin() + sel.k_star);
  std::sort(sel.kept.begin(), sel.kept.end());
  return sel;
}

nlohmann::json selection_to_json(const VariableSelection& sel) {
  nlohmann::json j;
  j["ranked"] = sel.ranked;
  j["kept"] = sel.kept;
  j["k_star"] = sel.k_star;
  j["k_values"] = sel.k_values;
  j["val_mse"] = sel.val_mse;
  j["excluded"] = sel.excluded;
  return j;
}

VariableSelection selection_from_json(const nlohmann::json& j) {
  VariableSelection sel;
  sel.ranked = j.at("ranked").get<std::vector<int>>();
  sel.kept = j.at("kept").get<std::vector<int>>();
  sel.k_star = j.at("k_star").get<int>();
  sel.k_values = j.at("k_values").get<std::vector<int>>();
  sel.val_mse = j.at("val_mse").get<std::vector<double>>();
  sel.excluded = j.at("excluded").get<std::vector<int>>();
  return sel;
}

}  // namespace larsen
