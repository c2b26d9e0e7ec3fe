#include "deimkit/sampling.hpp"

#include <cmath>

#include "deimkit/kernels.hpp"

namespace deimkit {

std::uint64_t Rng::next_u64() {
  // SplitMix64 (Steele/Lea/Flood)
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = 0.0;
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  cached_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

Index Rng::uniform_index(Index n) {
  if (n <= 0) throw ConfigError("Rng::uniform_index: n must be positive");
  return static_cast<Index>(next_u64() % static_cast<std::uint64_t>(n));
}

Matrix latin_hypercube(Index n, const std::vector<std::pair<double, double>>& ranges,
                       std::uint64_t seed) {
  if (n < 1) throw ConfigError("latin_hypercube: need n >= 1");
  const Index d = static_cast<Index>(ranges.size());
  if (d < 1) throw ConfigError("latin_hypercube: need at least one range");
  Rng rng(seed);
  Matrix x(n, d);
  std::vector<Index> perm(static_cast<size_t>(n));
  for (Index j = 0; j < d; ++j) {
    const auto [lo, hi] = ranges[static_cast<size_t>(j)];
    if (!(hi > lo)) throw ConfigError("latin_hypercube: degenerate range");
    for (Index i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
    for (Index i = n - 1; i > 0; --i)
      std::swap(perm[static_cast<size_t>(i)],
                perm[static_cast<size_t>(rng.uniform_index(i + 1))]);
    for (Index i = 0; i < n; ++i) {
      const double u = (static_cast<double>(perm[static_cast<size_t>(i)]) +
                        rng.uniform()) /
                       static_cast<double>(n);
      x(i, j) = lo + (hi - lo) * u;
    }
  }
  return x;
}

Matrix random_normal(Index rows, Index cols, Rng& rng) {
  Matrix a(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) a(i, j) = rng.normal();
  return a;
}

Matrix random_orthonormal(Index rows, Index cols, Rng& rng) {
  if (cols > rows) throw ConfigError("random_orthonormal: cols > rows");
  Matrix q, r;
  householder_qr(random_normal(rows, cols, rng), &q, r);
  return q;
}

}  // namespace deimkit
