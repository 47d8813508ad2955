#pragma once

#include "larsen/types.hpp"

#include "json.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace larsen {

// One step of the forward path.  `weights` holds the regression coefficients
// (in the standardized coordinates of mrsr_path) after the step's update; the
// active set is the set of regressors that have entered so far.
struct LarsStep {
  double gamma = 0.0;
  double c_max = 0.0;          // largest cumulative correlation before the step
  std::vector<int> active;     // sorted regressor indices, after entry
  Matrix weights;              // n_regressors x n_targets
};

// Full forward-selection path over standardized inputs.  The stored means and
// scales let callers map the per-step weights back to raw coordinates.
struct LarsPath {
  int n_regressors = 0;
  int n_targets = 0;
  std::vector<int> entry_order;   // regressor indices in order of entry
  std::vector<int> excluded;      // near-constant columns, never considered
  std::vector<LarsStep> steps;
  Vector x_mean;                  // per regressor column
  Vector x_scale;                 // 1.0 for excluded columns
  Vector t_mean;                  // per target column
};

// Cumulative correlation of every regressor column with a residual block:
// c_j = sum over target columns k of |residual.col(k) . x.col(j)|.
Vector cumulative_correlation(const Matrix& residual, const Matrix& x);

struct StepSize {
  double gamma = 1.0;
  std::vector<int> entering;  // indices attaining the minimum, ascending
};

// Smallest gamma in [0, 1] at which some inactive regressor catches up with
// the active set.  Columns of a and b carry, per inactive regressor j, the
// correlation terms a_j = residual' * x_j and b_j = (ols_fit - current_fit)' * x_j.
// All 2^p sign combinations over the p target rows are scanned.  Returns
// gamma = 1 and no entries when `inactive` is empty or nothing crosses.
StepSize lars_step_size(double c_max, const Matrix& a, const Matrix& b,
                        const std::vector<int>& inactive);

// Runs the full path: standardize columns, then repeatedly admit the most
// correlated regressor(s) and move toward the least-squares fit of the active
// set by the step size above.  The final step takes gamma = 1, so its weights
// are the minimum-norm least squares solution on all usable columns.
LarsPath mrsr_path(const Matrix& x, const Matrix& t);

struct VariableSelection {
  std::vector<int> ranked;      // full entry order
  std::vector<int> kept;        // first k_star of ranked
  int k_star = 0;
  std::vector<int> k_values;    // active-set size per evaluated step
  std::vector<double> val_mse;  // holdout MSE per evaluated step
  std::vector<int> excluded;    // near-constant columns
};

// Ranks regressors with mrsr_path on a fit split, scores every prefix on a
// holdout split, and keeps the shortest prefix whose holdout MSE is within
// one standard error of the best (the error bar of the winning estimate,
// computed from its per-entry squared errors).  The split is an index shuffle
// driven by `seed`.
VariableSelection select_variables(const Matrix& x, const Matrix& t,
                                   double val_fraction, std::uint64_t seed);

nlohmann::json selection_to_json(const VariableSelection& sel);
VariableSelection selection_from_json(const nlohmann::json& j);

}  // namespace larsen
