#pragma once

#include <cstdint>

namespace css {

// Deterministic counter-based generator (SplitMix64).
//
// The state advances by the 64-bit golden-ratio constant and each output is
// the SplitMix64 finalizer of the new state, so the i-th output of a stream
// is a pure function of (seed, stream_id, i) using only unsigned 64-bit
// arithmetic. Identical (seed, stream_id) therefore yields an identical
// sequence on every platform. Streams derived from one seed start at
// finalizer(seed + (stream_id + 1) * gamma), which decorrelates consecutive
// stream ids.
class RandomSource {
 public:
  RandomSource(std::uint64_t seed, std::uint64_t stream_id)
      : state_(mix(seed + (stream_id + 1) * kGamma)), seed_(seed), stream_id_(stream_id) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform draw in [0, 1) with 53 random bits.
  double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bernoulli(double p) { return next_uniform() < p; }

  // Uniform integer in [0, bound) by rejection-free multiply-shift; bound > 0.
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
};

inline RandomSource derive_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  return RandomSource(master_seed, stream_id);
}

}  // namespace css
