#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hics/types.hpp"

namespace hics {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Child seed for stream (a, b) of a master seed. Counter based, so the
/// value depends only on its inputs and not on evaluation order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

/// Seeded random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the distributions below are written
/// out here so that draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal (Box-Muller, second variate cached).
  double normal();

  /// Complex normal with independent N(0, 1/2) parts, so E|z|^2 = 1.
  cplx complex_normal();

  /// N(0,1) for real scalars, complex_normal() for complex ones.
  template <typename Scalar>
  Scalar gaussian() {
    if constexpr (is_complex_v<Scalar>) {
      return complex_normal();
    } else {
      return static_cast<Scalar>(normal());
    }
  }

  /// Uniform integer in [0, n).
  Index index(Index n);

  /// k distinct values from [0, n) in draw order (partial Fisher-Yates).
  std::vector<Index> sample_without_replacement(Index n, Index k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hics
