// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "isac/geometry.hpp"

#include <cmath>

namespace isac {

namespace {

// Phase increment per element index: 2 pi ((f + f_c)/c) d_A cos(angle).
double element_phase(const ArrayConfig& array, double baseband_freq_hz,
                     double angle_rad) {
    const double shifted = baseband_freq_hz + array.carrier_freq_hz;
    return 2.0 * kPi * (shifted / kSpeedOfLight) * array.spacing_m() *
           std::cos(angle_rad);
}

cvec steering_impl(const ArrayConfig& array, std::size_t count,
                   double baseband_freq_hz, double angle_rad) {
    const double step = element_phase(array, baseband_freq_hz, angle_rad);
    cvec v(count);
    for (std::size_t t = 0; t < count; ++t)
        v[t] = std::polar(1.0, -step * static_cast<double>(t));
    v[0] = cplx{1.0, 0.0};  // exact unit reference element
    return v;
}

void check_coherent_index(const SubcarrierGrid& grid, std::size_t n) {
    if (n < 1 || n > grid.n_coherent)
        throw std::invalid_argument("subcarrier index outside the coherent band");
}

}  // namespace

double doppler_shift(double speed_mps, double carrier_freq_hz) {
    return 2.0 * speed_mps * carrier_freq_hz / kSpeedOfLight;
}

DirectPathGeometry direct_path_geometry(Vec2 ue, Vec2 bs) {
    const Vec2 d = ue - bs;
    const double range = norm(d);
    if (!(range > 0.0))
        throw std::invalid_argument(
            "direct_path_geometry: mobile coincides with the base station");
    DirectPathGeometry g;
    g.delay_s = 2.0 * range / kSpeedOfLight;
    // Clamp guards rounding at the +-x axis before acos.
    const double c = std::min(1.0, std::max(-1.0, d.x / range));
    g.aoa_rad = std::acos(c);
    return g;
}

double path_loss_db(double distance_m, double ref_distance_m,
                    double carrier_freq_hz, double loss_exponent,
                    double shadowing_db) {
    if (!(distance_m > 0.0) || !(ref_distance_m > 0.0))
        throw std::invalid_argument("path_loss_db: distances must be > 0");
    const double free_space =
        20.0 * std::log10(4.0 * kPi * carrier_freq_hz * ref_distance_m /
                          kSpeedOfLight);
    return free_space + 10.0 * loss_exponent * std::log10(distance_m / ref_distance_m) +
           shadowing_db;
}

cvec steering_tx_at(const ArrayConfig& array, double baseband_freq_hz,
                    double angle_rad) {
    return steering_impl(array, array.n_tx, baseband_freq_hz, angle_rad);
}

cvec steering_rx_at(const ArrayConfig& array, double baseband_freq_hz,
                    double angle_rad) {
    return steering_impl(array, array.n_rx, baseband_freq_hz, angle_rad);
}

cvec steering_tx(const ArrayConfig& array, const SubcarrierGrid& grid,
                 std::size_t n, double angle_rad) {
    check_coherent_index(grid, n);
    return steering_tx_at(array, grid.baseband_freqs[n - 1], angle_rad);
}

cvec steering_rx(const ArrayConfig& array, const SubcarrierGrid& grid,
                 std::size_t n, double angle_rad) {
    check_coherent_index(grid, n);
    return steering_rx_at(array, grid.baseband_freqs[n - 1], angle_rad);
}

CMat radar_channel(const ArrayConfig& array, const SubcarrierGrid& grid,
                   const PropagationPath& path, double departure_rad,
                   double doppler_hz, std::size_t n) {
    check_coherent_index(grid, n);
    const double f_n = grid.baseband_freqs[n - 1];
    const cplx phase =
        std::polar(1.0, -2.0 * kPi * (f_n - doppler_hz) * path.delay_s);
    const cvec b = steering_rx_at(array, f_n, path.aoa_rad);
    const cvec a = steering_tx_at(array, f_n, departure_rad);
    CMat h(array.n_rx, array.n_tx);
    const cplx scale = path.gain * phase;
    for (std::size_t r = 0; r < array.n_rx; ++r)
        for (std::size_t t = 0; t < array.n_tx; ++t)
            h(r, t) = scale * b[r] * std::conj(a[t]);
    return h;
}

namespace {

double squared_norm(const cvec& v) {
    double s = 0.0;
    for (const auto& e : v) s += std::norm(e);
    return s;
}

// Squared norm of the rank-one per-path channel b_n(theta) a_n(phi)^H.
double steering_power(const ArrayConfig& array, double f_n, double theta,
                      double phi) {
    return squared_norm(steering_rx_at(array, f_n, theta)) *
           squared_norm(steering_tx_at(array, f_n, phi));
}

}  // namespace

double sinr_rad(const ArrayConfig& array, const SubcarrierGrid& grid,
                const PathSet& paths, std::size_t n, double beam_gain,
                double noise_var) {
    if (!(noise_var > 0.0))
        throw std::invalid_argument("sinr_rad: noise variance must be > 0");
    paths.validate();
    const double f_n = grid.freq(n);
    const double phi = paths.departure_rad;
    const auto& direct = paths.paths.front();
    const double signal = std::norm(direct.gain) *
                          steering_power(array, f_n, direct.aoa_rad, phi) *
                          beam_gain;
    double interference = 0.0;
    for (std::size_t k = 1; k < paths.paths.size(); ++k) {
        const auto& p = paths.paths[k];
        interference += std::norm(p.gain) *
                        steering_power(array, f_n, p.aoa_rad, phi) * beam_gain;
    }
    return signal / (interference + noise_var);
}

double sinr_com(const ArrayConfig& array, const SubcarrierGrid& grid,
                double large_scale_gain, const PathSet& paths, std::size_t n,
                double beam_gain_rad, double beam_gain_com, double noise_var) {
    if (!(noise_var > 0.0))
        throw std::invalid_argument("sinr_com: noise variance must be > 0");
    paths.validate();
    const double f_n = grid.freq(n);
    const double phi = paths.departure_rad;
    const double signal =
        large_scale_gain * squared_norm(steering_tx_at(array, f_n, phi)) *
        beam_gain_com;
    double interference = 0.0;
    for (const auto& p : paths.paths)
        interference += std::norm(p.gain) *
                        steering_power(array, f_n, p.aoa_rad, phi) *
                        beam_gain_rad;
    return signal / (noise_var + interference);
}

}  // namespace isac
