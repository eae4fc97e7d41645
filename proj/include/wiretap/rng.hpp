#pragma once

#include <cstdint>
#include <span>

namespace wiretap {

// Finalizer of splitmix64. Bijective on 64-bit words, full avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ull;

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return mix64(seed + kGolden64 + value);
}

// Stable seed derivation: one master seed fans out into independent streams
// addressed by (stream tag, counter). Per-counter streams make results
// independent of execution order across workers.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t counter) {
  return hash_combine(hash_combine(master, stream), counter);
}

// splitmix64. All sampling goes through this so results are identical on
// every platform (std::uniform_* distributions are not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += kGolden64;
    return mix64(state_);
  }

  // Uniform in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n) via 128-bit multiply-shift; n >= 1.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Inverse-CDF draw from a pmf; consumes exactly one uniform.
  int sample(std::span<const double> pmf) {
    const double u = next_double();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
      acc += pmf[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(pmf.size()) - 1;
  }

 private:
  std::uint64_t state_;
};

// Keyed hash of a symbol sequence; the lazy realization of a uniformly
// random binning of sequences. Deterministic in (seed, sequence).
inline std::uint64_t sequence_hash(std::uint64_t seed, std::span<const std::uint16_t> seq) {
  std::uint64_t h = mix64(seed + kGolden64);
  for (std::uint16_t sym : seq) h = mix64(h + kGolden64 + sym);
  return mix64(h ^ (static_cast<std::uint64_t>(seq.size()) << 32));
}

}  // namespace wiretap
