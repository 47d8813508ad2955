#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace larsen {

// Row-major everywhere: rows are samples, columns are variables, and the
// serialization code walks matrices in row order.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// A caller broke a documented precondition (bad shape, bad range, bad input).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numeric routine could not produce a trustworthy result (non-convergence,
// overflow into NaN/Inf, singular system where one was not allowed).
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool all_finite(const Matrix& m);

// Throws ContractViolation naming `what` when m contains NaN or Inf.
void require_finite(const Matrix& m, const std::string& what);

// Deterministic RNG with hand-rolled output mappings.  std::mt19937_64 has a
// portable bit stream, but the std distributions do not, so every mapping from
// raw bits to doubles/integers lives here.  Same seed, same sequence, on any
// conforming implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  // Gaussian via Box-Muller; consumes exactly two uniform draws per call.
  double gaussian(double mean, double sd);

  // Uniform integer in [0, n); rejection sampling, no modulo bias.
  std::size_t below(std::size_t n);

  // Fisher-Yates permutation of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

  std::uint64_t next_raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// Stable seed derivation for independent substreams: splitmix64 mixing of
// (master, stream).  Used so one master seed can drive many members, bags and
// splits without overlap.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace larsen
