// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

/**
 * @file types.hpp
 * @brief Core value types shared across the simulator: array layout, subcarrier
 *        grid, propagation paths, and the stacked echo/channel containers.
 */

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace isac {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

/// Propagation speed used for all delay and wavelength conversions [m/s].
inline constexpr double kSpeedOfLight = 3.0e8;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Planar position or displacement [m].
struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Uniform linear receive/transmit array at the base station, aligned with the
/// +x axis. Element spacing defaults to half a carrier wavelength.
struct ArrayConfig {
    std::size_t n_tx = 8;
    std::size_t n_rx = 8;
    double carrier_freq_hz = 60.0e9;
    /// Explicit element spacing [m]; 0 selects half-wavelength spacing.
    double element_spacing_m = 0.0;
    Vec2 bs_position{0.0, 0.0};

    double spacing_m() const {
        return element_spacing_m > 0.0 ? element_spacing_m
                                       : kSpeedOfLight / (2.0 * carrier_freq_hz);
    }

    void validate() const {
        if (n_tx < 1 || n_rx < 1)
            throw std::invalid_argument("ArrayConfig: antenna counts must be >= 1");
        if (!(carrier_freq_hz > 0.0))
            throw std::invalid_argument("ArrayConfig: carrier_freq_hz must be > 0");
        if (!(spacing_m() > 0.0))
            throw std::invalid_argument("ArrayConfig: element spacing must be > 0");
    }
};

/// OFDM subcarrier layout. The first n_coherent carriers form the coherently
/// processed estimation band; power allocation runs over all n_total carriers.
/// Baseband frequencies follow f_n = n / (n_total * sample_interval_s).
struct SubcarrierGrid {
    std::size_t n_total = 128;
    std::size_t n_coherent = 10;
    std::size_t n_symbols = 10;
    double sample_interval_s = 1.0e-8;
    /// f_n for n = 1..n_coherent [Hz]; fill with rebuild().
    std::vector<double> baseband_freqs;

    void rebuild() {
        baseband_freqs.resize(n_coherent);
        for (std::size_t n = 1; n <= n_coherent; ++n)
            baseband_freqs[n - 1] =
                static_cast<double>(n) / (static_cast<double>(n_total) * sample_interval_s);
    }

    /// Baseband frequency of subcarrier n for n = 1..n_total [Hz].
    double freq(std::size_t n) const {
        if (n < 1 || n > n_total)
            throw std::invalid_argument("SubcarrierGrid: subcarrier index out of range");
        return static_cast<double>(n) / (static_cast<double>(n_total) * sample_interval_s);
    }

    /// OFDM symbol duration [s]; the slow-time step between symbol indices.
    double symbol_duration_s() const {
        return static_cast<double>(n_total) * sample_interval_s;
    }

    void validate() const {
        if (n_coherent < 1 || n_total < n_coherent)
            throw std::invalid_argument("SubcarrierGrid: need n_total >= n_coherent >= 1");
        if (n_symbols < 1)
            throw std::invalid_argument("SubcarrierGrid: n_symbols must be >= 1");
        if (!(sample_interval_s > 0.0))
            throw std::invalid_argument("SubcarrierGrid: sample_interval_s must be > 0");
        if (baseband_freqs.size() != n_coherent)
            throw std::invalid_argument("SubcarrierGrid: baseband_freqs not rebuilt");
        for (std::size_t n = 1; n <= n_coherent; ++n)
            if (baseband_freqs[n - 1] != freq(n))
                throw std::invalid_argument("SubcarrierGrid: baseband_freqs inconsistent");
    }
};

/// One propagation path of the round-trip radar channel.
struct PropagationPath {
    cplx gain;           ///< Complex amplitude alpha_k.
    double delay_s = 0;  ///< Round-trip delay tau_k.
    double aoa_rad = 0;  ///< Arrival angle theta_k at the array, in [0, pi].
};

/// Direct reflection (index 0) plus indirect reflections, sharing one
/// departure angle and one Doppler shift.
struct PathSet {
    double departure_rad = 0.0;  ///< Departure angle phi toward the mobile.
    double doppler_hz = 0.0;     ///< Round-trip Doppler shift f_d.
    std::vector<PropagationPath> paths;  ///< paths[0] is the direct reflection.

    void validate() const {
        if (paths.empty())
            throw std::invalid_argument("PathSet: needs at least the direct path");
        if (paths.front().aoa_rad != departure_rad)
            throw std::invalid_argument("PathSet: direct-path arrival must equal departure");
        for (const auto& p : paths) {
            if (!(p.delay_s > 0.0))
                throw std::invalid_argument("PathSet: delays must be > 0");
            if (p.delay_s + 1e-18 < paths.front().delay_s)
                throw std::invalid_argument("PathSet: direct path must be the shortest");
        }
    }
};

/// Large-scale downlink channel parameters toward the mobile.
struct CommChannelParams {
    double path_loss_db = 0.0;
    double shadowing_db = 0.0;
    double loss_exponent = 2.9;
    double ref_distance_m = 1.0;
    /// Linear power gain, 10^(-path_loss_db / 10).
    double large_scale_gain = 1.0;

    void validate() const {
        const double expected = std::pow(10.0, -path_loss_db / 10.0);
        if (std::abs(large_scale_gain - expected) >
            1e-12 * std::max(1.0, std::abs(expected)))
            throw std::invalid_argument(
                "CommChannelParams: large_scale_gain inconsistent with path_loss_db");
    }
};

/// Mobile state: planar position plus radial speed.
struct UEState {
    Vec2 position{0.0, 0.0};
    double speed_mps = 0.0;
};

/// Stacked unknown channel: the direct-reflection gain followed by the
/// per-subcarrier equivalent indirect channel, indexed (n-1)*n_rx + (r-1).
struct EquivalentChannel {
    cplx direct{0.0, 0.0};
    cvec indirect;
};

/// Received echo samples over (subcarrier, symbol, antenna), stored flat in
/// the canonical order ((n-1)*n_symbols + (m-1))*n_rx + (r-1) with 1-based
/// n, m, r.
struct EchoTensor {
    std::size_t n_coherent = 0;
    std::size_t n_symbols = 0;
    std::size_t n_rx = 0;
    cvec samples;

    static std::size_t flat_index(std::size_t n, std::size_t m, std::size_t r,
                                  std::size_t n_symbols, std::size_t n_rx) {
        return ((n - 1) * n_symbols + (m - 1)) * n_rx + (r - 1);
    }

    std::size_t index(std::size_t n, std::size_t m, std::size_t r) const {
        return flat_index(n, m, r, n_symbols, n_rx);
    }

    cplx at(std::size_t n, std::size_t m, std::size_t r) const {
        return samples[index(n, m, r)];
    }
};

}  // namespace isac
