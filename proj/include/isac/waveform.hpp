// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

/**
 * @file waveform.hpp
 * @brief Effective transmit vectors and multipath echo synthesis.
 *
 * The echo synthesizer composes the per-path rank-one channels with the
 * transmit vectors into the canonical stacked sample order and optionally adds
 * circularly symmetric white noise from a caller-provided stream.
 */

#pragma once

#include <span>

#include "isac/rng.hpp"
#include "isac/types.hpp"

namespace isac {

/**
 * @brief Effective beamformed transmit vector for subcarrier n, symbol m.
 *
 * Element t (1-based) is exp(-j pi (t-1)) / sqrt(n_symbols): a fixed
 * sign-alternating beam, identical for every (n, m).
 */
cvec tx_vector(const SubcarrierGrid& grid, const ArrayConfig& array,
               std::size_t n, std::size_t m);

/// Per-(subcarrier, symbol) effective transmit vectors of length n_tx.
class TxWaveform {
  public:
    TxWaveform(std::size_t n_coherent, std::size_t n_symbols, std::size_t n_tx);

    /// Builds the fixed sign-alternating beam for every (n, m).
    static TxWaveform phase_alternating(const SubcarrierGrid& grid,
                                        const ArrayConfig& array);

    std::size_t n_coherent() const { return n_coherent_; }
    std::size_t n_symbols() const { return n_symbols_; }
    std::size_t n_tx() const { return n_tx_; }

    /// Vector for subcarrier n, symbol m (both 1-based).
    std::span<const cplx> at(std::size_t n, std::size_t m) const {
        return {data_.data() + ((n - 1) * n_symbols_ + (m - 1)) * n_tx_, n_tx_};
    }

    std::span<cplx> at(std::size_t n, std::size_t m) {
        return {data_.data() + ((n - 1) * n_symbols_ + (m - 1)) * n_tx_, n_tx_};
    }

  private:
    std::size_t n_coherent_;
    std::size_t n_symbols_;
    std::size_t n_tx_;
    cvec data_;
};

/// Noiseless direct-reflection echo component, stacked canonically over
/// (subcarrier, symbol, antenna).
cvec synthesize_dr(const SubcarrierGrid& grid, const ArrayConfig& array,
                   const PathSet& paths, const TxWaveform& waveform);

/// Noiseless indirect-reflection echo component (sum over indirect paths).
cvec synthesize_idr(const SubcarrierGrid& grid, const ArrayConfig& array,
                    const PathSet& paths, const TxWaveform& waveform);

/// Full echo: direct plus indirect components plus complex white noise of
/// per-sample variance noise_var drawn in canonical sample order.
EchoTensor synthesize_echo(const SubcarrierGrid& grid, const ArrayConfig& array,
                           const PathSet& paths, const TxWaveform& waveform,
                           double noise_var, RandomStream& rng);

/**
 * @brief Scalar downlink sample at the mobile for subcarrier n, symbol m.
 *
 * sqrt(large-scale gain) * a_n(phi)^H comm_tx, plus the sensing beam leaking
 * through every path seen at the single-antenna mobile, plus the supplied
 * noise sample.
 */
cplx received_comm_sample(const SubcarrierGrid& grid, const ArrayConfig& array,
                          const PathSet& paths, const CommChannelParams& comm,
                          const TxWaveform& radar_waveform,
                          std::span<const cplx> comm_tx, std::size_t n,
                          std::size_t m, cplx noise);

}  // namespace isac
