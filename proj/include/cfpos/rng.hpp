// cfpos — positioning simulation library for cell-free massive MIMO
// Copyright (C) 2026 cfpos contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

#include "cfpos/common.hpp"

namespace cfpos {

/// Deterministic random stream (xoshiro256++ core, splitmix64 seeding).
///
/// The standard library distributions are implementation-defined, so every
/// draw here is produced from raw 64-bit words with fixed arithmetic. Streams
/// are addressable: substream(tag...) derives an independent generator from
/// the parent seed and the tag words alone, never from the parent's position.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : seed_(seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64(s);
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
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

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; one spare value is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

    double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

    /// Circularly symmetric complex normal with E|z|^2 = 1.
    std::complex<double> complex_gaussian() {
        constexpr double half = 0.5;
        return {gaussian() * std::sqrt(half), gaussian() * std::sqrt(half)};
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // Rejection-free modulo bias is negligible for n << 2^64, but stay exact.
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    /// Independent stream addressed by up to three tag words.
    RandomStream substream(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
        std::uint64_t mixed = seed_;
        mixed = mix(mixed, a + 1);
        mixed = mix(mixed, b + 1);
        mixed = mix(mixed, c + 1);
        return RandomStream(mixed);
    }

    static std::uint64_t splitmix64(std::uint64_t& state) {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
        std::uint64_t s = h ^ (v * 0xFF51AFD7ED558CCDull);
        return splitmix64(s);
    }

    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Stream tags used to address the derived substreams of one scenario seed.
namespace stream_tag {
inline constexpr std::uint64_t kApPlacement = 0x5150;
inline constexpr std::uint64_t kUePlacement = 0x5245;
inline constexpr std::uint64_t kNlosAngles = 0x414E;
inline constexpr std::uint64_t kChannelBlock = 0x4348;
inline constexpr std::uint64_t kFeatureDraws = 0x4645;
inline constexpr std::uint64_t kTraining = 0x5452;
inline constexpr std::uint64_t kBaseline = 0x4241;
}  // namespace stream_tag

}  // namespace cfpos
