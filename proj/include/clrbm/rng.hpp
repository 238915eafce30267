#pragma once

#include <cstdint>

namespace clrbm {

/// Counter-based pseudo-random generator (SplitMix64): a 64-bit Weyl
/// sequence pushed through an avalanching finalizer. Streams are
/// bit-identical for a given seed on every platform, which the experiment
/// harness relies on for byte-identical outputs.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
    std::uint64_t state_;
};

/// Derives an independent stream seed from a master seed. This is the
/// documented splitting rule used everywhere (per-trial chains, per-trial
/// inits): mix the master with a stream index through the SplitMix64
/// finalizer so that nearby indices give unrelated streams.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master ^ (stream * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace clrbm
