#pragma once

#include <cmath>
#include <cstdint>

namespace evdenoise {

// SplitMix64 finalizer. Pure function of its input.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Counter-based generator: output i is splitmix64(key + i * golden_gamma),
// which is exactly the reference SplitMix64 sequence seeded with `key`.
// Sampling helpers below use only this stream plus <cmath>, so a given seed
// gives the same values on any conforming platform.
class CounterRng {
public:
    static constexpr const char* kAlgorithm = "splitmix64";

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_(splitmix64(seed ^ splitmix64(stream + 0x5EEDull))) {}

    std::uint64_t next() noexcept {
        const std::uint64_t z = key_ + counter_ * 0x9E3779B97F4A7C15ull;
        ++counter_;
        return splitmix64(z);
    }

    std::uint64_t counter() const noexcept { return counter_; }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound); multiply-shift, bias below 2^-32 for bound < 2^32.
    std::uint64_t below(std::uint64_t bound) noexcept {
        __extension__ typedef unsigned __int128 u128;
        return static_cast<std::uint64_t>((static_cast<u128>(next()) * bound) >> 64);
    }

    bool coin() noexcept { return (next() >> 63) != 0; }

    double exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

    // Box-Muller; uses two draws per call and discards the second variate.
    double normal() noexcept {
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Exact Poisson sampling: multiplication method on chunks of mean <= 16,
    // summed (Poisson variates are additive).
    std::uint64_t poisson(double mean) noexcept {
        std::uint64_t total = 0;
        while (mean > 0.0) {
            const double chunk = mean > 16.0 ? 16.0 : mean;
            mean -= chunk;
            const double limit = std::exp(-chunk);
            double prod = uniform();
            while (prod > limit) {
                ++total;
                prod *= uniform();
            }
        }
        return total;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace evdenoise
