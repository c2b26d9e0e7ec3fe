#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "deimkit/types.hpp"

namespace deimkit {

/// Deterministic 64-bit generator (xoshiro-free, platform-stable): SplitMix64
/// streams feeding explicit uniform/normal transforms, so sequences are
/// bit-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64();
  double uniform();                     // [0, 1)
  double uniform(double lo, double hi);
  double normal();                      // Box-Muller, cached pair
  Index uniform_index(Index n);         // [0, n)

 private:
  std::uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

/// n x dims Latin hypercube sample: stratified per dimension with a seeded
/// Fisher-Yates permutation, mapped into [lo_d, hi_d].
Matrix latin_hypercube(Index n, const std::vector<std::pair<double, double>>& ranges,
                       std::uint64_t seed);

/// Random matrix with iid standard normal entries.
Matrix random_normal(Index rows, Index cols, Rng& rng);

/// Random m x r matrix with orthonormal columns (QR of a Gaussian).
Matrix random_orthonormal(Index rows, Index cols, Rng& rng);

}  // namespace deimkit
