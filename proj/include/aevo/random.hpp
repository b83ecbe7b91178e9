#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace aevo {

/// Seedable random stream shared by every stochastic operation.
///
/// Satisfies UniformRandomBitGenerator so it can be handed to <algorithm>
/// facilities such as std::sample. Output is reproducible per seed within a
/// single build; no cross-platform bit-exactness is promised.
class RandomSource {
public:
    using result_type = std::uint64_t;

    explicit RandomSource(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    // single owner: copying would silently fork the stream
    RandomSource(const RandomSource&) = delete;
    RandomSource& operator=(const RandomSource&) = delete;
    RandomSource(RandomSource&&) noexcept = default;
    RandomSource& operator=(RandomSource&&) noexcept = default;

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }

    result_type operator()() { return engine_(); }

    std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform real in [0, 1) built from the top 53 bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        if (n == 0) {
            throw std::invalid_argument("RandomSource::index: empty range");
        }
        std::uniform_int_distribution<std::size_t> dist(0, n - 1);
        return dist(engine_);
    }

    bool coin() { return (engine_() >> 63) != 0; }

    /// Derive an independent seed for a child stream (splitmix64 step).
    std::uint64_t split() {
        std::uint64_t z = engine_() + 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace aevo
