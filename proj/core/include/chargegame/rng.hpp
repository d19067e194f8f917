#pragma once

#include <cstdint>

namespace chargegame {

/// SplitMix64 finalizer. Fully specified here so that sampled populations are
/// portable across platforms and standard-library implementations:
///   z += 0x9e3779b97f4a7c15
///   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
///   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
///   return z ^ (z >> 31)
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based generator: state advances by the SplitMix64 increment, each
/// output is mix64 of the state. Doubles are the top 53 bits scaled to [0,1).
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = mix64(state_);
        state_ += 0x9e3779b97f4a7c15ULL;
        return z;
    }

    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform draw on [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  private:
    std::uint64_t state_;
};

/// Per-trial stream seed: mix64 applied to the model seed, then absorbing m
/// and the trial index. Independent of execution order, so trials can run in
/// parallel and still merge deterministically.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t m,
                                   std::uint64_t trial) {
    std::uint64_t s = mix64(seed);
    s = mix64(s ^ m);
    s = mix64(s ^ trial);
    return s;
}

}  // namespace chargegame
