#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sphereflow {

/// SplitMix64 finalizer; used to derive independent stream seeds from a
/// base seed plus indices. The constants are the reference ones.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for an independent substream identified by (a, b), e.g. a = grid
/// index and b = trial index of a sweep. Chaining SplitMix64 keeps trials
/// decorrelated while staying reproducible for any thread count.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

/// Deterministic random source: std::mt19937_64 (bit-exact by the standard)
/// with hand-rolled uniform and Gaussian transforms. The std distributions
/// are implementation-defined, so we do not use them: runs must reproduce
/// bit-for-bit for a fixed seed on a fixed build.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1): top 53 bits of the engine output.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1]; never zero, safe under log().
    double uniform_pos() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the second value of each pair is
    /// cached so consecutive calls consume engine output deterministically.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.28318530717958647692 * u2; // 2*pi
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace sphereflow
