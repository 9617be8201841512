#pragma once

#include <cstdint>

namespace qds {

// SplitMix64 finalizer; good avalanche, used both as a mixer and as the
// generator step.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Small counter-based generator. Streams are derived from a key, so any
// (seed, trial, round, kind) tuple yields the same sequence regardless of
// which worker thread consumes it.
class Rng {
  public:
    explicit Rng(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound); bound > 0. Rejection keeps it unbiased.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = -bound % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

  private:
    std::uint64_t state_;
};

enum class StreamKind : std::uint64_t {
    data_error = 1,
    syndrome_flip = 2,
    weight_shape = 3,
    qc_search = 4,
};

inline Rng make_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t round,
                       StreamKind kind) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ mix64(trial ^ 0xd1b54a32d192ed03ull));
    h = mix64(h ^ mix64(round ^ 0x8cb92ba72f3d8dd7ull));
    h = mix64(h ^ static_cast<std::uint64_t>(kind));
    return Rng(h);
}

// Carries the (seed, trial) part of a stream key through sampling code.
struct TrialKey {
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;

    Rng stream(std::uint64_t round, StreamKind kind) const {
        return make_stream(seed, trial, round, kind);
    }
};

}  // namespace qds
