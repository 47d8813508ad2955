#pragma once

#include "larsen/elm.hpp"
#include "larsen/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace larsen {

struct GaConfig {
  int population = 20;
  int generations = 100;
  double crossover_fraction = 0.8;  // fraction of each generation bred by crossover
  double mutation_rate = 0.05;      // per-gene reset probability
  int elitism = 1;                  // top individuals copied through unchanged
  std::uint64_t seed = 0;

  void validate() const;
};

// Scales a nonnegative weight vector to sum 1.  Throws ContractViolation on
// negative entries or a zero sum.
Vector normalize_weights(const Vector& w);

// Pairwise error correlations of ensemble members on a validation set:
// C(i, j) = mean over validation entries of (pred_i - y) * (pred_j - y).
// The diagonal holds each member's validation MSE.
Matrix correlation_matrix(const std::vector<Matrix>& predictions, const Matrix& targets);

// Generalization error of the weighted ensemble, w' C w.
double ensemble_error(const Vector& weights, const Matrix& correlation);

struct ClosedFormWeights {
  Vector weights;             // sums to 1; entries may be negative
  double condition = 0.0;     // eigenvalue ratio of the correlation matrix
  bool ill_conditioned = false;
};

// Analytic minimizer of w' C w subject to sum(w) = 1:
// w_k proportional to the k-th row sum of C^-1.  Computed with a
// pseudo-inverted eigendecomposition so near-singular C does not blow up;
// the condition number is reported so callers can distrust the answer.
ClosedFormWeights optimal_weights_closed_form(const Matrix& correlation);

struct GaResult {
  Vector best;                // best-ever raw genome
  double best_fitness = 0.0;
  std::vector<double> trace;  // best fitness in the population, one entry per
                              // generation, index 0 = initial population
};

// Real-coded genetic algorithm over genomes in [0,1]^genome_size:
// fitness-proportional selection, arithmetic crossover, per-gene reset
// mutation, elitism.  `fitness` must return positive finite values.
GaResult ga_evolve(const std::function<double(const Vector&)>& fitness,
                   int genome_size, const GaConfig& config);

struct GasenResult {
  std::vector<int> selected;  // member indices whose evolved weight exceeds lambda
  Vector weights;             // normalized evolved weights, all members
  std::vector<double> ga_trace;
};

// Evolves ensemble weights against w' C w on the validation predictions and
// keeps the members whose normalized weight exceeds `lambda`.  If none do,
// the single best-weighted member is kept, so the result is never empty.
GasenResult gasen_select_predictions(const std::vector<Matrix>& predictions,
                                     const Matrix& validation_y, double lambda,
                                     const GaConfig& config);

// Same, but runs the member models on validation inputs first.
GasenResult gasen_select(const std::vector<ElmModel>& members,
                         const Matrix& validation_x, const Matrix& validation_y,
                         double lambda, const GaConfig& config);

}  // namespace larsen
