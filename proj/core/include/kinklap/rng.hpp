//---------------------------------------------------------------------------//
// Copyright kinklap contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace kinklap {

/// Counter-based splittable random stream. Each (seed, index) pair opens an
/// independent stream, so generation parallelizes over indices with no
/// sequence coupling and results are bitwise identical for any thread count.
/// The state transition is the splitmix64 generator.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t index)
        : state_(mix(seed ^ mix(0x9E3779B97F4A7C15ull * (index + 1)))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1].
    double next_double_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (portable, no libm distribution state).
    double next_gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = next_double_open();
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

  private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

/// Stable derivation of sub-seeds, e.g. per-trial seeds in experiments.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return CounterRng::mix(seed ^ CounterRng::mix(a ^ CounterRng::mix(b + 0x51ED270B71A2B4E5ull)));
}

}  // namespace kinklap
