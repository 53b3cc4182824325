// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "isac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "isac/geometry.hpp"

namespace isac {

namespace {

constexpr std::size_t kMaxRejection = 100000;

// Uniform position in the annulus min_distance <= |p - bs| <= radius, by
// rejection from the bounding square.
Vec2 draw_in_disc(const ScenarioConfig& config, RandomStream& rng) {
    for (std::size_t attempt = 0; attempt < kMaxRejection; ++attempt) {
        const double x = rng.uniform(-config.radius_m, config.radius_m);
        const double y = rng.uniform(-config.radius_m, config.radius_m);
        const double r = std::hypot(x, y);
        if (r >= config.min_distance_m && r <= config.radius_m)
            return config.array.bs_position + Vec2{x, y};
    }
    throw std::runtime_error("sample_scenario: disc rejection failed");
}

// Range drawn from the disc radial law (density proportional to r), placed
// along a pinned arrival direction.
Vec2 draw_at_angle(const ScenarioConfig& config, double angle_rad,
                   RandomStream& rng) {
    for (std::size_t attempt = 0; attempt < kMaxRejection; ++attempt) {
        const double r = config.radius_m * std::sqrt(rng.uniform());
        if (r >= config.min_distance_m)
            return config.array.bs_position +
                   Vec2{r * std::cos(angle_rad), r * std::sin(angle_rad)};
    }
    throw std::runtime_error("sample_scenario: radial rejection failed");
}

cplx path_gain(double echo_gain, double phase, double delay_s) {
    const double length = delay_s * kSpeedOfLight;
    return echo_gain * std::polar(1.0, phase) / (length * length);
}

}  // namespace

Scenario sample_scenario(const ScenarioConfig& config, RandomStream& rng) {
    config.validate();
    const Vec2 bs = config.array.bs_position;
    const bool full_circle = config.aoa_min_rad <= -kPi && config.aoa_max_rad >= kPi;

    Scenario out;
    if (config.fixed_ue) {
        out.ue.position = *config.fixed_ue;
    } else if (config.fixed_aoa_rad) {
        out.ue.position = draw_at_angle(config, *config.fixed_aoa_rad, rng);
    } else if (!full_circle) {
        const double angle = rng.uniform(config.aoa_min_rad, config.aoa_max_rad);
        out.ue.position = draw_at_angle(config, angle, rng);
    } else {
        out.ue.position = draw_in_disc(config, rng);
    }
    out.ue.speed_mps = config.fixed_speed_mps
                           ? *config.fixed_speed_mps
                           : rng.uniform(config.speed_min_mps, config.speed_max_mps);

    const DirectPathGeometry direct =
        direct_path_geometry(out.ue.position, bs);
    const double direct_phase = rng.uniform(-kPi, kPi);

    out.paths.departure_rad = direct.aoa_rad;
    out.paths.doppler_hz =
        doppler_shift(out.ue.speed_mps, config.array.carrier_freq_hz);
    out.paths.paths.push_back({path_gain(config.echo_gain, direct_phase,
                                         direct.delay_s),
                               direct.delay_s, direct.aoa_rad});

    const double direct_dist = norm(out.ue.position - bs);
    out.buildings.reserve(config.n_indirect);
    for (std::size_t k = 0; k < config.n_indirect; ++k) {
        Vec2 building{};
        double delay = 0.0;
        bool accepted = false;
        for (std::size_t attempt = 0; attempt < kMaxRejection; ++attempt) {
            building = draw_in_disc(config, rng);
            // Round trip visits the mobile and the obstacle before returning.
            const double length = direct_dist + norm(out.ue.position - building) +
                                  norm(building - bs);
            delay = length / kSpeedOfLight;
            // Resolvable paths only: the indirect delay must differ from the
            // direct one by at least a sample interval.
            if (std::abs(delay - direct.delay_s) >= config.grid.sample_interval_s) {
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw std::runtime_error("sample_scenario: obstacle rejection failed");
        const double phase = rng.uniform(-kPi, kPi);
        const Vec2 toward = building - bs;
        const double aoa =
            std::acos(std::clamp(toward.x / norm(toward), -1.0, 1.0));
        out.buildings.push_back(building);
        out.paths.paths.push_back(
            {path_gain(config.echo_gain, phase, delay), delay, aoa});
    }

    const double shadow =
        rng.normal() * std::sqrt(config.shadowing_var_db);
    out.comm.loss_exponent = config.loss_exponent;
    out.comm.ref_distance_m = config.ref_distance_m;
    out.comm.shadowing_db = shadow;
    out.comm.path_loss_db =
        path_loss_db(direct_dist, config.ref_distance_m,
                     config.array.carrier_freq_hz, config.loss_exponent, shadow);
    out.comm.large_scale_gain = std::pow(10.0, -out.comm.path_loss_db / 10.0);

    out.paths.validate();
    out.comm.validate();
    return out;
}

}  // namespace isac
