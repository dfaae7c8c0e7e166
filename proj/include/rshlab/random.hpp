#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace rshlab {

/// SplitMix64 (Steele, Lea, Flood): output i is mix64(seed + (i + 1) * gamma), so the
/// generator is a pure function of (seed, counter) and identical on every platform.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    static constexpr std::uint64_t gamma = 0x9e3779b97f4a7c15ULL;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(state_ += gamma); }

    /// Independent stream for run `index` of an experiment seeded with `master`.
    static SplitMix64 stream(std::uint64_t master, std::uint64_t index) {
        return SplitMix64(mix64(mix64(master) + index * gamma));
    }

  private:
    std::uint64_t state_;
};

/// Uniform double in [0, 1) with 53 random bits.
template <class Rng>
double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound) by Lemire's multiply-and-reject.
template <class Rng>
std::uint64_t uniform_below(Rng &rng, std::uint64_t bound) {
    if (bound == 0)
        return 0;
    unsigned __int128 m = static_cast<unsigned __int128>(rng()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(rng()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

/// Number of Bernoulli(p) trials up to and including the first success, p in (0, 1],
/// by inversion so the result does not depend on the standard library.
template <class Rng>
std::uint64_t geometric_trials(Rng &rng, double p) {
    if (p >= 1.0)
        return 1;
    if (!(p > 0.0))
        return std::numeric_limits<std::uint64_t>::max();
    const double u = 1.0 - uniform01(rng); // (0, 1]
    const double k = std::floor(std::log(u) / std::log1p(-p));
    if (!(k < 9.0e18))
        return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(k) + 1;
}

} // namespace rshlab
