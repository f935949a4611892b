#ifndef LQCS_RNG_HPP
#define LQCS_RNG_HPP

#include <cmath>
#include <cstdint>

namespace lqcs {

// SplitMix64 (Steele/Lea/Flood, "Fast splittable pseudorandom number
// generators", OOPSLA 2014). The state advances by the golden-ratio gamma and
// the output is a bijective finalizer of the state, so the n-th output is a
// pure function of (seed, n). Constants below are the reference ones; every
// stream in this toolkit derives from this generator so that identical seeds
// reproduce identical results across runs, platforms and worker counts.
inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t splitmix64_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// One-step keyed mixing used to derive sub-seeds, e.g.
// trial_seed = mix64(mix64(mix64(master, k_index), q_index), trial).
inline constexpr std::uint64_t mix64(std::uint64_t h, std::uint64_t v) {
  return splitmix64_finalize(h ^ (v + kGoldenGamma));
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64_finalize(state_ += kGoldenGamma); }

  // Uniform on [0, 1), 53 mantissa bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; never returns 0 so it is safe under log().
  double next_open_double() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. Consumes two words per draw; the sine
  // branch is discarded to keep the stream layout position-independent.
  double next_gaussian() {
    const double u1 = next_open_double();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Uniform integer in [0, bound) by rejection from the top of the range.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

 private:
  std::uint64_t state_;
};

}  // namespace lqcs

#endif  // LQCS_RNG_HPP
