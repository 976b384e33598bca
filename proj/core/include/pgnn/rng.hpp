#pragma once

#include <cstdint>
#include <vector>

namespace pgnn {

// Seeded generator with explicitly defined distributions. The standard
// library's distribution objects are implementation-defined, so sampling is
// done by hand on top of a fixed-algorithm engine to keep runs reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream derived from (seed, stream); used to key per-epoch
  // shuffles and per-member initialisation off one experiment seed.
  static Rng keyed(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 bits of mantissa.
  double uniform01();

  // Uniform on [lo, hi).
  double uniform(double lo, double hi);

  // Unbiased integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t state_[4];
};

// SplitMix64 mixing step; also used to derive stream seeds.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace pgnn
