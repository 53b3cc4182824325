// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

/**
 * @file rng.hpp
 * @brief Deterministic random streams with explicit seed derivation.
 *
 * Every stochastic component draws from a RandomStream derived from
 * (master seed, purpose, index), so results are reproducible bit-for-bit
 * for a given master seed regardless of thread count or trial order.
 */

#pragma once

#include <cstdint>
#include <random>

#include "isac/types.hpp"

namespace isac {

/// Labels for derived sub-streams; values are part of the output contract.
enum class StreamPurpose : std::uint64_t {
    scenario = 1,
    noise = 2,
    baseline = 3,
};

/// Derives an independent stream seed from a master seed and two labels.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t label,
                       std::uint64_t index = 0);

/// Seeded generator producing uniforms and normals with a fixed algorithm
/// (explicit Box-Muller), so sequences do not depend on library internals.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; generates pairs, caches the second.
    double normal();

    /// Circularly symmetric complex normal with total variance `variance`
    /// (variance / 2 per real component).
    cplx circular_normal(double variance);

    std::uint64_t bits() { return gen_(); }

  private:
    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace isac
