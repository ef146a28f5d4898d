/*
 * faceselect - greedy selection of spatial features for facial
 * expression recognition.
 *
 * File: include/fsel/rng.hpp
 *
 * Copyright 2026 The faceselect authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace fsel {

// The standard pins down mt19937_64's output sequence but not the
// distributions or std::shuffle, so everything that must reproduce across
// toolchains draws through the helpers below.
using Rng = std::mt19937_64;

/// Unbiased draw from [0, n) via rejection sampling. n must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

/// Standard normal via Box-Muller. Draws two uniforms per sample; the
/// second half of the pair is discarded to keep the stream stateless.
inline double gaussian(Rng& rng) {
    const double u1 = 1.0 - uniform_unit(rng); // (0, 1]
    const double u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

/// Fisher-Yates with explicit draws.
template <typename T>
inline void det_shuffle(std::vector<T>& values, Rng& rng) {
    for (std::size_t k = values.size(); k > 1; --k) {
        const std::size_t other = static_cast<std::size_t>(uniform_below(rng, k));
        std::swap(values[k - 1], values[other]);
    }
}

} // namespace fsel
