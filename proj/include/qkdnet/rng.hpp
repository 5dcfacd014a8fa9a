#pragma once

#include <cstdint>
#include <limits>

namespace qkdnet {

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator and can derive
/// independent substreams from a (round, component) coordinate, so draws for
/// one stage never shift the draws of another.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit constexpr Rng(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform double in [0, 1).
    constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

    __extension__ typedef unsigned __int128 u128;

    /// Uniform integer in [0, n). n must be > 0.
    constexpr std::uint64_t below(std::uint64_t n) noexcept {
        // Lemire's multiply-shift; bias is < 2^-64 * n, irrelevant here.
        return static_cast<std::uint64_t>((static_cast<u128>((*this)()) * n) >> 64);
    }

    /// Independent substream keyed by (stream, component).
    [[nodiscard]] constexpr Rng split(std::uint64_t stream, std::uint64_t component = 0) const noexcept {
        std::uint64_t s = mix(state_ ^ mix(stream + 0x632BE59BD9B4E019ULL));
        s = mix(s ^ mix(component * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
        return Rng(s);
    }

private:
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace qkdnet
