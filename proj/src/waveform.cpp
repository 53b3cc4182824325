// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "isac/waveform.hpp"

#include <cmath>

#include "isac/geometry.hpp"

namespace isac {

cvec tx_vector(const SubcarrierGrid& grid, const ArrayConfig& array,
               std::size_t n, std::size_t m) {
    if (n < 1 || n > grid.n_coherent || m < 1 || m > grid.n_symbols)
        throw std::invalid_argument("tx_vector: subcarrier or symbol index out of range");
    const double scale = 1.0 / std::sqrt(static_cast<double>(grid.n_symbols));
    cvec v(array.n_tx);
    for (std::size_t t = 0; t < array.n_tx; ++t)
        v[t] = (t % 2 == 0) ? cplx{scale, 0.0} : cplx{-scale, 0.0};
    return v;
}

TxWaveform::TxWaveform(std::size_t n_coherent, std::size_t n_symbols,
                       std::size_t n_tx)
    : n_coherent_(n_coherent),
      n_symbols_(n_symbols),
      n_tx_(n_tx),
      data_(n_coherent * n_symbols * n_tx, cplx{0.0, 0.0}) {
    if (n_coherent < 1 || n_symbols < 1 || n_tx < 1)
        throw std::invalid_argument("TxWaveform: dimensions must be >= 1");
}

TxWaveform TxWaveform::phase_alternating(const SubcarrierGrid& grid,
                                         const ArrayConfig& array) {
    TxWaveform wf(grid.n_coherent, grid.n_symbols, array.n_tx);
    for (std::size_t n = 1; n <= grid.n_coherent; ++n)
        for (std::size_t m = 1; m <= grid.n_symbols; ++m) {
            const cvec v = tx_vector(grid, array, n, m);
            auto dst = wf.at(n, m);
            for (std::size_t t = 0; t < v.size(); ++t) dst[t] = v[t];
        }
    return wf;
}

namespace {

void check_waveform(const SubcarrierGrid& grid, const ArrayConfig& array,
                    const TxWaveform& waveform) {
    if (waveform.n_coherent() != grid.n_coherent ||
        waveform.n_symbols() != grid.n_symbols || waveform.n_tx() != array.n_tx)
        throw std::invalid_argument("waveform dimensions do not match grid/array");
}

// Sums one path family (direct when direct_only, otherwise all indirect
// paths) into the canonical stacked layout. Each contribution factors into a
// delay/Doppler phase, a receive steering element, and the projection of the
// transmit vector onto the departure steering vector. The direct return also
// advances in phase across the symbol train at the Doppler frequency; the
// indirect returns are quasi-static over the burst, so their phases stay
// fixed across symbols and fold into the per-subcarrier equivalent response.
cvec synthesize_component(const SubcarrierGrid& grid, const ArrayConfig& array,
                          const PathSet& paths, const TxWaveform& waveform,
                          bool direct_only) {
    paths.validate();
    check_waveform(grid, array, waveform);
    const std::size_t n_c = grid.n_coherent;
    const std::size_t n_m = grid.n_symbols;
    const std::size_t n_r = array.n_rx;
    cvec out(n_c * n_m * n_r, cplx{0.0, 0.0});

    const std::size_t k_begin = direct_only ? 0 : 1;
    const std::size_t k_end = direct_only ? std::min<std::size_t>(1, paths.paths.size())
                                          : paths.paths.size();
    const double slow_step =
        2.0 * kPi * paths.doppler_hz * grid.symbol_duration_s();

#pragma omp parallel for schedule(static)
    for (std::size_t n = 1; n <= n_c; ++n) {
        const double f_n = grid.baseband_freqs[n - 1];
        const cvec a = steering_tx_at(array, f_n, paths.departure_rad);
        for (std::size_t k = k_begin; k < k_end; ++k) {
            const auto& path = paths.paths[k];
            const cplx scale =
                path.gain * std::polar(1.0, -2.0 * kPi *
                                                (f_n - paths.doppler_hz) *
                                                path.delay_s);
            const cvec b = steering_rx_at(array, f_n, path.aoa_rad);
            for (std::size_t m = 1; m <= n_m; ++m) {
                const auto w = waveform.at(n, m);
                cplx proj{0.0, 0.0};
                for (std::size_t t = 0; t < array.n_tx; ++t)
                    proj += std::conj(a[t]) * w[t];
                const cplx slow =
                    (k == 0) ? std::polar(1.0, slow_step *
                                                   static_cast<double>(m - 1))
                             : cplx{1.0, 0.0};
                const cplx factor = scale * slow * proj;
                const std::size_t base = ((n - 1) * n_m + (m - 1)) * n_r;
                for (std::size_t r = 0; r < n_r; ++r)
                    out[base + r] += factor * b[r];
            }
        }
    }
    return out;
}

}  // namespace

cvec synthesize_dr(const SubcarrierGrid& grid, const ArrayConfig& array,
                   const PathSet& paths, const TxWaveform& waveform) {
    return synthesize_component(grid, array, paths, waveform, true);
}

cvec synthesize_idr(const SubcarrierGrid& grid, const ArrayConfig& array,
                    const PathSet& paths, const TxWaveform& waveform) {
    return synthesize_component(grid, array, paths, waveform, false);
}

EchoTensor synthesize_echo(const SubcarrierGrid& grid, const ArrayConfig& array,
                           const PathSet& paths, const TxWaveform& waveform,
                           double noise_var, RandomStream& rng) {
    if (noise_var < 0.0)
        throw std::invalid_argument("synthesize_echo: noise variance must be >= 0");
    EchoTensor echo;
    echo.n_coherent = grid.n_coherent;
    echo.n_symbols = grid.n_symbols;
    echo.n_rx = array.n_rx;
    echo.samples = synthesize_dr(grid, array, paths, waveform);
    const cvec idr = synthesize_idr(grid, array, paths, waveform);
    for (std::size_t i = 0; i < echo.samples.size(); ++i)
        echo.samples[i] += idr[i];
    if (noise_var > 0.0) {
        // Serial draw in canonical order keeps the result independent of the
        // synthesis thread count.
        for (auto& s : echo.samples) s += rng.circular_normal(noise_var);
    }
    return echo;
}

cplx received_comm_sample(const SubcarrierGrid& grid, const ArrayConfig& array,
                          const PathSet& paths, const CommChannelParams& comm,
                          const TxWaveform& radar_waveform,
                          std::span<const cplx> comm_tx, std::size_t n,
                          std::size_t m, cplx noise) {
    paths.validate();
    check_waveform(grid, array, radar_waveform);
    if (comm_tx.size() != array.n_tx)
        throw std::invalid_argument("received_comm_sample: comm_tx length mismatch");
    if (n < 1 || n > grid.n_coherent || m < 1 || m > grid.n_symbols)
        throw std::invalid_argument("received_comm_sample: index out of range");

    const double f_n = grid.baseband_freqs[n - 1];
    const cvec a = steering_tx_at(array, f_n, paths.departure_rad);
    cplx signal{0.0, 0.0};
    for (std::size_t t = 0; t < array.n_tx; ++t)
        signal += std::conj(a[t]) * comm_tx[t];
    signal *= std::sqrt(comm.large_scale_gain);

    // Sensing-beam leakage at the single-antenna mobile: each path reduces to
    // a scalar coefficient (unit arrival response). The direct leak carries
    // the same slow-time phase progression as the radar echo.
    const auto w = radar_waveform.at(n, m);
    cplx proj{0.0, 0.0};
    for (std::size_t t = 0; t < array.n_tx; ++t) proj += std::conj(a[t]) * w[t];
    cplx interference{0.0, 0.0};
    for (std::size_t k = 0; k < paths.paths.size(); ++k) {
        const auto& path = paths.paths[k];
        cplx phase =
            std::polar(1.0, -2.0 * kPi * (f_n - paths.doppler_hz) * path.delay_s);
        if (k == 0)
            phase *= std::polar(1.0, 2.0 * kPi * paths.doppler_hz *
                                         grid.symbol_duration_s() *
                                         static_cast<double>(m - 1));
        interference += path.gain * phase * proj;
    }
    return signal + interference + noise;
}

}  // namespace isac
