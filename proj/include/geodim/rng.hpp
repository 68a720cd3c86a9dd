#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace geodim {

/// SplitMix64 output function. Bijective on 64-bit words; used both to
/// derive substream seeds and to expand a single seed into engine state.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed for the index-th substream of a master seed: the (index+1)-th
/// output of SplitMix64 seeded with `seed`. Distinct indices give
/// decorrelated streams, so parallel workers can draw independently
/// while results stay independent of the worker count.
inline constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

/// xoshiro256++ generator with distribution helpers.
///
/// All draws are pure functions of the constructor seed, so any quantity
/// produced from a fixed seed is bit-identical from run to run. Methods
/// that consume a data-dependent number of uniforms (rejection samplers)
/// are still deterministic because the stream itself is.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept {
        std::uint64_t s = seed;
        for (auto& word : state_) {
            s += 0x9E3779B97F4A7C15ULL;
            word = mix64(s);
        }
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1); rejects the single zero value.
    double uniform_pos() noexcept {
        double u;
        do {
            u = uniform01();
        } while (u == 0.0);
        return u;
    }

    /// Uniform integer in [0, bound). Rejection from the top half-open
    /// range removes modulo bias.
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    /// Standard normal via the Marsaglia polar method; the spare deviate
    /// is cached so consecutive calls cost one rejection loop per pair.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang squeeze; shapes below one are
    /// boosted through Gamma(shape+1) * U^(1/shape).
    double gamma_variate(double shape) {
        if (!(shape > 0.0)) throw std::invalid_argument("gamma_variate: shape must be positive");
        if (shape < 1.0) {
            const double u = uniform_pos();
            return gamma_variate(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Beta(a, b) as X/(X+Y) for independent gammas.
    double beta_variate(double a, double b) {
        double x, y;
        do {
            x = gamma_variate(a);
            y = gamma_variate(b);
        } while (x + y == 0.0);
        return x / (x + y);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace geodim
