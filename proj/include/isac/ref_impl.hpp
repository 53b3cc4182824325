// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

/**
 * @file ref_impl.hpp
 * @brief Serial reference implementations of the hot kernels.
 *
 * These compose results from the per-path channel matrices and dense linear
 * algebra with no parallelism or structure exploitation. They exist to pin
 * down the production kernels in tests and benchmarks: both lanes must agree
 * to tight tolerances on identical inputs.
 */

#pragma once

#include "isac/estimator.hpp"
#include "isac/linalg.hpp"
#include "isac/types.hpp"
#include "isac/waveform.hpp"

namespace isac::ref {

/// Noiseless echo field via explicit per-path channel matrices, serial.
cvec synthesize_field(const SubcarrierGrid& grid, const ArrayConfig& array,
                      const PathSet& paths, const TxWaveform& waveform);

/// Dense regression matrix: direct column next to the indirect block.
CMat coefficient_dense(const UEState& state, const SubcarrierGrid& grid,
                       const ArrayConfig& array, const TxWaveform& waveform);

/// Stacks the equivalent channel into a flat vector (direct entry first).
cvec stack_channel(const EquivalentChannel& h);

/// Dense normal-equations channel estimate (same equations as the structured
/// solver, assembled and factored without exploiting sparsity).
EquivalentChannel estimate_channel_dense(const CMat& coeff, const cvec& y);

}  // namespace isac::ref
