// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

/**
 * @file test_rng.cpp
 * @brief Seed mixing and deterministic draw contracts.
 */
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "isac/rng.hpp"

using namespace isac;

TEST_CASE("mix_seed separates masters, labels, and indices", "[rng]") {
    const std::uint64_t base = mix_seed(42, 1, 0);
    CHECK(mix_seed(42, 1, 0) == base);
    CHECK(mix_seed(43, 1, 0) != base);
    CHECK(mix_seed(42, 2, 0) != base);
    CHECK(mix_seed(42, 1, 1) != base);

    std::set<std::uint64_t> seen;
    for (std::uint64_t master = 0; master < 8; ++master)
        for (std::uint64_t label = 1; label <= 3; ++label)
            for (std::uint64_t index = 0; index < 64; ++index)
                seen.insert(mix_seed(master, label, index));
    CHECK(seen.size() == 8u * 3u * 64u);
}

TEST_CASE("streams with equal seeds replay identically", "[rng]") {
    RandomStream a(mix_seed(7, 2, 5));
    RandomStream b(mix_seed(7, 2, 5));
    for (int i = 0; i < 256; ++i) {
        CHECK(a.uniform() == b.uniform());
        CHECK(a.normal() == b.normal());
        CHECK(a.circular_normal(2.0) == b.circular_normal(2.0));
        CHECK(a.bits() == b.bits());
    }
}

TEST_CASE("uniform draws respect their ranges", "[rng]") {
    RandomStream rng(1234);
    double lo = 1.0;
    double hi = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform(-kPi, kPi);
        REQUIRE(u >= -kPi);
        REQUIRE(u < kPi);
    }
}

TEST_CASE("normal draws have unit variance and zero mean", "[rng]") {
    RandomStream rng(99);
    const int n = 200000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("circular normal splits variance across components", "[rng]") {
    RandomStream rng(2024);
    const int n = 200000;
    const double variance = 3.0;
    double re_sq = 0.0;
    double im_sq = 0.0;
    double cross = 0.0;
    for (int i = 0; i < n; ++i) {
        const cplx z = rng.circular_normal(variance);
        re_sq += z.real() * z.real();
        im_sq += z.imag() * z.imag();
        cross += z.real() * z.imag();
    }
    CHECK(std::abs(re_sq / n - variance / 2.0) < 0.03);
    CHECK(std::abs(im_sq / n - variance / 2.0) < 0.03);
    CHECK(std::abs(cross / n) < 0.02);
}

TEST_CASE("purpose labels give disjoint streams", "[rng]") {
    RandomStream scen(mix_seed(5, static_cast<std::uint64_t>(StreamPurpose::scenario), 0));
    RandomStream noise(mix_seed(5, static_cast<std::uint64_t>(StreamPurpose::noise), 0));
    RandomStream base(mix_seed(5, static_cast<std::uint64_t>(StreamPurpose::baseline), 0));
    int equal = 0;
    for (int i = 0; i < 64; ++i) {
        const double a = scen.uniform();
        const double b = noise.uniform();
        const double c = base.uniform();
        if (a == b || b == c || a == c) ++equal;
    }
    CHECK(equal == 0);
}
