// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

/**
 * @file geometry.hpp
 * @brief Geometry-to-channel mapping: Doppler, round-trip path geometry,
 *        frequency-dependent array steering, per-path radar channels, large
 *        scale path loss, and per-subcarrier SINR ratios.
 */

#pragma once

#include "isac/linalg.hpp"
#include "isac/types.hpp"

namespace isac {

/// Round-trip Doppler shift for radial speed v: 2 v f_c / c [Hz].
double doppler_shift(double speed_mps, double carrier_freq_hz);

struct DirectPathGeometry {
    double delay_s = 0.0;  ///< Round-trip delay 2 d / c.
    double aoa_rad = 0.0;  ///< Arrival angle in [0, pi] measured from +x.
};

/// Round-trip delay and arrival angle of the direct reflection.
/// @throws std::invalid_argument when the two points coincide.
DirectPathGeometry direct_path_geometry(Vec2 ue, Vec2 bs);

/**
 * @brief Log-distance path loss with shadowing [dB].
 *
 * Free-space loss at the reference distance plus 10 * exponent *
 * log10(d / d_ref) plus the shadowing term.
 * @throws std::invalid_argument for non-positive distances.
 */
double path_loss_db(double distance_m, double ref_distance_m,
                    double carrier_freq_hz, double loss_exponent,
                    double shadowing_db);

/**
 * @brief Transmit steering vector at an explicit baseband frequency.
 *
 * Element t (1-based) is exp(-j 2 pi (t-1) ((f + f_c)/c) d_A cos(angle));
 * the first element is exactly 1.
 */
cvec steering_tx_at(const ArrayConfig& array, double baseband_freq_hz,
                    double angle_rad);

/// Receive-side counterpart of steering_tx_at with n_rx elements.
cvec steering_rx_at(const ArrayConfig& array, double baseband_freq_hz,
                    double angle_rad);

/// Transmit steering vector for coherent-band subcarrier n (1..n_coherent).
cvec steering_tx(const ArrayConfig& array, const SubcarrierGrid& grid,
                 std::size_t n, double angle_rad);

/// Receive steering vector for coherent-band subcarrier n (1..n_coherent).
cvec steering_rx(const ArrayConfig& array, const SubcarrierGrid& grid,
                 std::size_t n, double angle_rad);

/**
 * @brief Rank-one per-path radar channel on subcarrier n.
 *
 * gain * exp(-j 2 pi (f_n - f_d) tau) * b_n(theta) a_n(phi)^H, an
 * n_rx x n_tx matrix.
 */
CMat radar_channel(const ArrayConfig& array, const SubcarrierGrid& grid,
                   const PropagationPath& path, double departure_rad,
                   double doppler_hz, std::size_t n);

/**
 * @brief Per-unit-power sensing SINR on subcarrier n (1..n_total).
 *
 * Direct-reflection power |alpha_0|^2 ||b||^2 ||a||^2 g over the sum of
 * per-path indirect powers plus the noise variance. Path powers enter as
 * squared magnitudes; the steering factor is the squared norm of the
 * rank-one channel and is common to every path.
 */
double sinr_rad(const ArrayConfig& array, const SubcarrierGrid& grid,
                const PathSet& paths, std::size_t n, double beam_gain,
                double noise_var);

/**
 * @brief Per-unit-power downlink SINR on subcarrier n (1..n_total).
 *
 * Large-scale gain times ||a||^2 g_com over the noise variance plus the
 * per-path sensing interference powers (direct and indirect, squared
 * magnitudes, steering norms, g_rad).
 */
double sinr_com(const ArrayConfig& array, const SubcarrierGrid& grid,
                double large_scale_gain, const PathSet& paths, std::size_t n,
                double beam_gain_rad, double beam_gain_com, double noise_var);

}  // namespace isac
