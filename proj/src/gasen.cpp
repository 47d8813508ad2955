#include "larsen/gasen.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace larsen {

void GaConfig::validate() const {
  if (population < 2) {
    throw ContractViolation("GaConfig: population must be >= 2");
  }
  if (generations < 1) {
    throw ContractViolation("GaConfig: generations must be >= 1");
  }
  if (!(crossover_fraction >= 0.0 && crossover_fraction <= 1.0)) {
    throw ContractViolation("GaConfig: crossover_fraction must lie in [0, 1]");
  }
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
    throw ContractViolation("GaConfig: mutation_rate must lie in [0, 1]");
  }
  if (elitism < 0 || elitism >= population) {
    throw ContractViolation("GaConfig: elitism must lie in [0, population)");
  }
}

Vector normalize_weights(const Vector& w) {
  if (w.size() < 1) {
    throw ContractViolation("normalize_weights: empty vector");
  }
  double sum = 0.0;
  for (Index i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w(i)) || w(i) < 0.0) {
      throw ContractViolation("normalize_weights: weights must be finite and nonnegative");
    }
    sum += w(i);
  }
  if (!(sum > 0.0)) {
    throw ContractViolation("normalize_weights: weights sum to zero");
  }
  return w / sum;
}

Matrix correlation_matrix(const std::vector<Matrix>& predictions, const Matrix& targets) {
  if (predictions.empty()) {
    throw ContractViolation("correlation_matrix: no predictions");
  }
  require_finite(targets, "correlation_matrix: targets");
  if (targets.rows() < 1 || targets.cols() < 1) {
    throw ContractViolation("correlation_matrix: empty targets");
  }
  const Index count = static_cast<Index>(predictions.size());
  const Index entries = targets.size();

  Matrix errors(entries, count);
  for (Index i = 0; i < count; ++i) {
    const Matrix& p = predictions[static_cast<std::size_t>(i)];
    require_finite(p, "correlation_matrix: prediction " + std::to_string(i));
    if (p.rows() != targets.rows() || p.cols() != targets.cols()) {
      throw ContractViolation("correlation_matrix: prediction " + std::to_string(i) +
                              " does not match the target shape");
    }
    const Matrix diff = p - targets;
    errors.col(i) = Eigen::Map<const Vector>(diff.data(), entries);
  }

  Matrix c = (errors.transpose() * errors) / static_cast<double>(entries);
  c = ((c + c.transpose()) * 0.5).eval();  // exact symmetry despite roundoff
  return c;
}

double ensemble_error(const Vector& weights, const Matrix& correlation) {
  if (correlation.rows() != correlation.cols()) {
    throw ContractViolation("ensemble_error: correlation matrix must be square");
  }
  if (weights.size() != correlation.rows()) {
    throw ContractViolation("ensemble_error: weight count does not match matrix size");
  }
  return weights.dot(correlation * weights);
}

ClosedFormWeights optimal_weights_closed_form(const Matrix& correlation) {
  const Index n = correlation.rows();
  if (n < 1 || correlation.cols() != n) {
    throw ContractViolation("optimal_weights_closed_form: matrix must be square");
  }
  require_finite(correlation, "optimal_weights_closed_form");
  const double scale = correlation.cwiseAbs().maxCoeff();
  if ((correlation - correlation.transpose()).cwiseAbs().maxCoeff() >
      1e-8 * std::max(1.0, scale)) {
    throw ContractViolation("optimal_weights_closed_form: matrix is not symmetric");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> eig(correlation);
  if (eig.info() != Eigen::Success) {
    throw NumericFailure("optimal_weights_closed_form: eigendecomposition failed");
  }
  const Vector& ev = eig.eigenvalues();  // ascending
  const double ev_max = std::abs(ev(n - 1));
  const double ev_min = std::abs(ev(0));
  const double cutoff =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * ev_max;

  Vector inv_ev = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    if (std::abs(ev(i)) > cutoff) {
      inv_ev(i) = 1.0 / ev(i);
    }
  }
  const Matrix pinv =
      eig.eigenvectors() * inv_ev.asDiagonal() * eig.eigenvectors().transpose();

  ClosedFormWeights out;
  out.condition = ev_min > 0.0 ? ev_max / ev_min
                               : std::numeric_limits<double>::infinity();
  out.ill_conditioned = !(out.condition < 1e12);

  const Vector row_sums = pinv.rowwise().sum();
  const double total = row_sums.sum();
  if (std::abs(total) < 1e-300) {
    throw NumericFailure(
        "optimal_weights_closed_form: degenerate correlation matrix, row sums cancel");
  }
  out.weights = row_sums / total;
  return out;
}

namespace {

struct Evaluated {
  Vector genome;
  double fitness = 0.0;
};

double checked_fitness(const std::function<double(const Vector&)>& fitness,
                       const Vector& genome) {
  const double f = fitness(genome);
  if (!std::isfinite(f)) {
    throw NumericFailure("ga_evolve: fitness returned a non-finite value");
  }
  if (!(f > 0.0)) {
    throw ContractViolation("ga_evolve: fitness must be positive");
  }
  return f;
}

Vector random_genome(Rng& rng, int genome_size) {
  Vector g(genome_size);
  do {
    for (Index i = 0; i < g.size(); ++i) {
      g(i) = rng.uniform();
    }
  } while (g.sum() <= 0.0);  // an all-zero genome cannot be normalized
  return g;
}

std::size_t roulette(const std::vector<Evaluated>& pop, double total, Rng& rng) {
  const double r = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    acc += pop[i].fitness;
    if (r < acc) {
      return i;
    }
  }
  return pop.size() - 1;  // r landed on the boundary
}

}  // namespace

GaResult ga_evolve(const std::function<double(const Vector&)>& fitness,
                   int genome_size, const GaConfig& config) {
  config.validate();
  if (genome_size < 1) {
    throw ContractViolation("ga_evolve: genome_size must be >= 1");
  }
  if (!fitness) {
    throw ContractViolation("ga_evolve: fitness function is empty");
  }

  Rng rng(config.seed);
  const std::size_t pop_size = static_cast<std::size_t>(config.population);

  std::vector<Evaluated> pop(pop_size);
  for (auto& e : pop) {
    e.genome = random_genome(rng, genome_size);
    e.fitness = checked_fitness(fitness, e.genome);
  }

  GaResult result;
  result.best = pop[0].genome;
  result.best_fitness = pop[0].fitness;
  auto track_best = [&result](const Evaluated& e) {
    if (e.fitness > result.best_fitness) {
      result.best_fitness = e.fitness;
      result.best = e.genome;
    }
  };
  double gen_best = 0.0;
  for (const auto& e : pop) {
    track_best(e);
    gen_best = std::max(gen_best, e.fitness);
  }
  result.trace.push_back(gen_best);

  std::vector<std::size_t> order(pop_size);
  for (int gen = 0; gen < config.generations; ++gen) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&pop](std::size_t a, std::size_t b) {
      if (pop[a].fitness != pop[b].fitness) {
        return pop[a].fitness > pop[b].fitness;
      }
      return a < b;
    });
    const double total =
        std::accumulate(pop.begin(), pop.end(), 0.0,
                        [](double acc, const Evaluated& e) { return acc + e.fitness; });

    std::vector<Evaluated> next;
    next.reserve(pop_size);
    for (int e = 0; e < config.elitism; ++e) {
      next.push_back(pop[order[static_cast<std::size_t>(e)]]);
    }

    // Survivors copied by roulette; the rest bred by arithmetic crossover.
    const long wanted_carry =
        std::lround((1.0 - config.crossover_fraction) * static_cast<double>(pop_size));
    const long carry = std::max<long>(0, wanted_carry - config.elitism);
    for (long i = 0; i < carry && next.size() < pop_size; ++i) {
      next.push_back(pop[roulette(pop, total, rng)]);
    }
    while (next.size() < pop_size) {
      const Evaluated& u = pop[roulette(pop, total, rng)];
      const Evaluated& v = pop[roulette(pop, total, rng)];
      const double alpha = rng.uniform();
      Evaluated c1;
      c1.genome = alpha * u.genome + (1.0 - alpha) * v.genome;
      next.push_back(std::move(c1));
      if (next.size() < pop_size) {
        Evaluated c2;
        c2.genome = (1.0 - alpha) * u.genome + alpha * v.genome;
        next.push_back(std::move(c2));
      }
    }

    for (std::size_t i = static_cast<std::size_t>(config.elitism); i < pop_size; ++i) {
      Vector& g = next[i].genome;
      for (Index k = 0; k < g.size(); ++k) {
        if (rng.uniform() < config.mutation_rate) {
          g(k) = rng.uniform();
        }
      }
      if (g.sum() <= 0.0) {
        g = random_genome(rng, genome_size);
      }
    }

    pop = std::move(next);
    gen_best = 0.0;
    for (std::size_t i = 0; i < pop_size; ++i) {
      if (i >= static_cast<std::size_t>(config.elitism)) {
        pop[i].fitness = checked_fitness(fitness, pop[i].genome);
      }
      track_best(pop[i]);
      gen_best = std::max(gen_best, pop[i].fitness);
    }
    result.trace.push_back(gen_best);
  }
  return result;
}

GasenResult gasen_select_predictions(const std::vector<Matrix>& predictions,
                                     const Matrix& validation_y, double lambda,
                                     const GaConfig& config) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw ContractViolation("gasen_select_predictions: lambda must lie in (0, 1)");
  }
  const Matrix c = correlation_matrix(predictions, validation_y);

  const auto fitness = [&c](const Vector& w) {
    const Vector wn = w / w.sum();
    return 1.0 / (ensemble_error(wn, c) + 1e-12);
  };
  const GaResult ga =
      ga_evolve(fitness, static_cast<int>(predictions.size()), config);

  GasenResult out;
  out.weights = normalize_weights(ga.best);
  out.ga_trace = ga.trace;
  for (Index i = 0; i < out.weights.size(); ++i) {
    if (out.weights(i) > lambda) {
      out.selected.push_back(static_cast<int>(i));
    }
  }
  if (out.selected.empty()) {
    Index best = 0;
    out.weights.maxCoeff(&best);
    out.selected.push_back(static_cast<int>(best));
  }
  return out;
}

GasenResult gasen_select(const std::vector<ElmModel>& members,
                         const Matrix& validation_x, const Matrix& validation_y,
                         double lambda, const GaConfig& config) {
  if (members.empty()) {
    throw ContractViolation("gasen_select: no members");
  }
  std::vector<Matrix> predictions;
  predictions.reserve(members.size());
  for (const ElmModel& m : members) {
    predictions.push_back(elm_predict(m, validation_x));
  }
  return gasen_select_predictions(predictions, validation_y, lambda, config);
}

}  // namespace larsen
