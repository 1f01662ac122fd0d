// Copyright 2026 The dccsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

namespace dccsim {

/// Purposes that own an independent random stream per entity.
enum class StreamPurpose : std::uint64_t {
    Fading = 1,
    Backoff = 2,
    Phase = 3,
    Scenario = 4,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a stream key from a base seed and any number of identifiers.
template <typename... Ids>
constexpr std::uint64_t stream_key(std::uint64_t seed, Ids... ids) noexcept
{
    std::uint64_t h = splitmix64(seed);
    ((h = splitmix64(h ^ static_cast<std::uint64_t>(ids))), ...);
    return h;
}

/// Counter-based generator: a cheap UniformRandomBitGenerator for keyed draws
/// such as one fading sample per (link, frame).
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    constexpr explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// Long-lived per-(entity, purpose) stream.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t entity, StreamPurpose purpose)
{
    return std::mt19937_64{stream_key(seed, entity, static_cast<std::uint64_t>(purpose))};
}

/// Uniform double in [0, 1) built from the top 53 bits; identical on every platform.
template <typename Urbg>
double uniform01(Urbg& g)
{
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Standard normal pair via Box-Muller, platform independent.
template <typename Urbg>
std::pair<double, double> normal_pair(Urbg& g)
{
    double u1 = uniform01(g);
    while (u1 <= 0.0) u1 = uniform01(g);
    const double u2 = uniform01(g);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

/// Uniform integer in [0, n] without modulo bias.
template <typename Urbg>
std::uint32_t uniform_int_inclusive(Urbg& g, std::uint32_t n)
{
    const std::uint64_t range = static_cast<std::uint64_t>(n) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x = g();
    while (x >= limit) x = g();
    return static_cast<std::uint32_t>(x % range);
}

} // namespace dccsim
