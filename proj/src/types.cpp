#include "larsen/types.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace larsen {

bool all_finite(const Matrix& m) {
  return m.allFinite();
}

void require_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite()) {
    throw ContractViolation(what + ": matrix contains NaN or Inf");
  }
}

double Rng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  if (!(lo < hi)) {
    throw ContractViolation("Rng::uniform: empty interval");
  }
  return lo + (hi - lo) * uniform();
}

double Rng::gaussian(double mean, double sd) {
  if (!(sd >= 0.0) || !std::isfinite(sd) || !std::isfinite(mean)) {
    throw ContractViolation("Rng::gaussian: bad parameters");
  }
  const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::below(std::size_t n) {
  if (n == 0) {
    throw ContractViolation("Rng::below: n must be positive");
  }
  const std::uint64_t m = static_cast<std::uint64_t>(n);
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t rem = (max % m + 1) % m;  // 2^64 mod m
  const std::uint64_t limit = max - rem;
  std::uint64_t x = gen_();
  while (x > limit) {
    x = gen_();
  }
  return static_cast<std::size_t>(x % m);
}

std::vector<std::size_t> Rng::permutation(std::size_t n) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = i;
  }
  for (std::size_t i = n; i > 1; --i) {
    std::swap(p[i - 1], p[below(i)]);
  }
  return p;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream ^ 0x6c62272e07bb0142ull));
}

}  // namespace larsen
