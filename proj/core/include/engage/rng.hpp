#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace engage {

// SplitMix64: a tiny 64-bit generator used for per-replication substreams.
// Satisfies std::uniform_random_bit_generator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Seed for replication `index` of a run seeded with `seed`. Independent of
// how replications are partitioned across workers.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 mix(seed);
  const std::uint64_t base = mix();
  SplitMix64 second(base ^ (index * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
  return second();
}

// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw. Used instead
// of std::uniform_real_distribution so streams are identical across standard
// library implementations.
template <std::uniform_random_bit_generator Gen>
double unit_uniform(Gen& gen) {
  static_assert(Gen::max() - Gen::min() == std::numeric_limits<std::uint64_t>::max(),
                "unit_uniform needs a full-range 64-bit generator");
  return static_cast<double>((gen() - Gen::min()) >> 11) * 0x1.0p-53;
}

using Rng = std::mt19937_64;

}  // namespace engage
