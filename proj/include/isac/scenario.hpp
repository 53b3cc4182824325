// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

/**
 * @file scenario.hpp
 * @brief Randomized deployment sampling: mobile placement, reflecting
 *        obstacles, path delays/gains, and large-scale downlink loss.
 */

#pragma once

#include <optional>

#include "isac/rng.hpp"
#include "isac/types.hpp"

namespace isac {

/**
 * @brief Deployment parameters for one sampled drop.
 *
 * The mobile falls uniformly in the disc of `radius_m` around the base
 * station, at least `min_distance_m` away; each obstacle is drawn the same
 * way and resampled until its round-trip delay differs from the direct one
 * by at least one sample interval. Path gains carry a uniform random phase
 * and decay with the squared round-trip path length, scaled by `echo_gain`.
 */
struct ScenarioConfig {
    SubcarrierGrid grid;
    ArrayConfig array;
    double radius_m = 50.0;
    double min_distance_m = 1.0;
    double speed_min_mps = 0.0;
    double speed_max_mps = 20.0;
    std::size_t n_indirect = 2;
    /// Angular sector for the mobile draw; the default spans the full circle.
    double aoa_min_rad = -kPi;
    double aoa_max_rad = kPi;
    /// Common scale on every path gain; calibrates echo strength.
    double echo_gain = 1.0;
    double loss_exponent = 2.9;
    double ref_distance_m = 1.0;
    double shadowing_var_db = 5.7;
    double noise_var_radar = 1.0e-14;
    double noise_var_comm = 1.0e-14;
    /// Pin the mobile position instead of drawing it.
    std::optional<Vec2> fixed_ue;
    /// Pin the mobile speed instead of drawing it.
    std::optional<double> fixed_speed_mps;
    /// Pin the arrival angle; the range is still drawn from the disc law.
    std::optional<double> fixed_aoa_rad;

    ScenarioConfig() { grid.rebuild(); }

    void validate() const {
        grid.validate();
        array.validate();
        if (!(radius_m > 0.0) || !(min_distance_m > 0.0) ||
            min_distance_m >= radius_m)
            throw std::invalid_argument(
                "ScenarioConfig: need 0 < min_distance_m < radius_m");
        if (speed_max_mps < speed_min_mps)
            throw std::invalid_argument("ScenarioConfig: speed range inverted");
        if (aoa_max_rad < aoa_min_rad)
            throw std::invalid_argument("ScenarioConfig: angle range inverted");
        if (!(echo_gain > 0.0))
            throw std::invalid_argument("ScenarioConfig: echo_gain must be > 0");
        if (!(ref_distance_m > 0.0))
            throw std::invalid_argument("ScenarioConfig: ref_distance_m must be > 0");
        if (shadowing_var_db < 0.0)
            throw std::invalid_argument(
                "ScenarioConfig: shadowing_var_db must be >= 0");
        if (noise_var_radar < 0.0 || noise_var_comm < 0.0)
            throw std::invalid_argument(
                "ScenarioConfig: noise variances must be >= 0");
    }
};

/// One sampled drop: mobile state, obstacle positions, the resulting path
/// set, and the large-scale downlink parameters.
struct Scenario {
    UEState ue;
    std::vector<Vec2> buildings;
    PathSet paths;
    CommChannelParams comm;
};

/**
 * @brief Draws one deployment from the given stream.
 *
 * Draw order is fixed and part of the reproducibility contract: mobile
 * position (rejection from the bounding square, or the disc radial law when
 * the arrival angle is pinned), speed, direct-path phase, then per obstacle
 * its position (with delay-separation rejection) followed by its path phase,
 * and finally the shadowing deviate.
 * @throws std::runtime_error when obstacle rejection fails to terminate.
 */
Scenario sample_scenario(const ScenarioConfig& config, RandomStream& rng);

}  // namespace isac
