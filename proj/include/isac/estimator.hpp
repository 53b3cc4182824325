// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

/**
 * @file estimator.hpp
 * @brief Mobile state estimation from stacked echo samples.
 *
 * The estimator alternates two steps. Given a state hypothesis it solves a
 * linear least-squares problem for the stacked equivalent channel (direct
 * gain plus per-subcarrier indirect channel); given that channel it takes a
 * damped Gauss-Newton step on the state using analytic partial derivatives
 * of the model. The per-iteration residual is non-increasing by
 * construction: the line search only accepts non-increasing candidates and
 * the channel refit can only lower the residual further.
 *
 * The regression matrix couples the state through a single dense column (the
 * direct-reflection response) while the indirect unknowns enter through a
 * block of scaled identity columns; solves exploit that structure and apply a
 * trace-scaled ridge when the normal matrix is ill-conditioned.
 *
 * A uniform linear array cannot distinguish mirror-image positions across its
 * axis, so estimates are reported in the half plane y >= bs_y.
 */

#pragma once

#include <array>
#include <optional>

#include "isac/linalg.hpp"
#include "isac/types.hpp"
#include "isac/waveform.hpp"

namespace isac {

/// Grid-search settings for estimator initialization: a coarse sweep
/// over range and arrival-angle cosine (upper half plane) crossed with a
/// small set of speed hypotheses, then one local refinement pass around the
/// best candidate.
struct GridInitSpec {
    std::size_t points_per_axis = 21;
    std::vector<double> speeds{0.0, 10.0, 20.0};
    double radius_m = 50.0;
    double min_distance_m = 1.0;
    std::size_t refine_points = 7;
};

struct EstimatorConfig {
    std::size_t max_iterations = 50;
    /// Termination threshold on the damped step norm (position in m, speed
    /// in m/s, combined Euclidean).
    double step_tolerance = 1.0e-4;
    /// Explicit initialization; when unset the grid search runs instead.
    std::optional<UEState> init;
    GridInitSpec grid_init;
    /// Conditioning threshold that triggers the ridge in channel solves.
    double cond_limit = 1.0e12;
    /// Ridge size as a fraction of trace(A)/dim.
    double ridge_scale = 1.0e-10;
    std::size_t max_backtracks = 10;

    void validate() const {
        if (!(step_tolerance > 0.0))
            throw std::invalid_argument("EstimatorConfig: step_tolerance must be > 0");
        if (!(cond_limit > 1.0))
            throw std::invalid_argument("EstimatorConfig: cond_limit must be > 1");
    }
};

/**
 * @brief Structured regression matrix mapping the stacked channel to the
 *        noiseless echo model.
 *
 * Column 0 is the dense direct-reflection column; the remaining columns form
 * a block-sparse pattern where column (n-1)*n_rx + r touches only rows of
 * subcarrier n, antenna r, with the per-(n, m) transmit projection scalar.
 * Only the dense column and the projection scalars are stored.
 */
class CoefficientMatrix {
  public:
    CoefficientMatrix(std::size_t n_coherent, std::size_t n_symbols,
                      std::size_t n_rx)
        : n_coherent_(n_coherent),
          n_symbols_(n_symbols),
          n_rx_(n_rx),
          direct_(n_coherent * n_symbols * n_rx, cplx{0.0, 0.0}),
          projection_(n_coherent * n_symbols, cplx{0.0, 0.0}) {}

    std::size_t rows() const { return n_coherent_ * n_symbols_ * n_rx_; }
    std::size_t cols() const { return n_coherent_ * n_rx_ + 1; }
    std::size_t n_coherent() const { return n_coherent_; }
    std::size_t n_symbols() const { return n_symbols_; }
    std::size_t n_rx() const { return n_rx_; }

    const cvec& direct() const { return direct_; }
    cvec& direct() { return direct_; }

    /// Transmit projection scalar for subcarrier n, symbol m (1-based).
    cplx projection(std::size_t n, std::size_t m) const {
        return projection_[(n - 1) * n_symbols_ + (m - 1)];
    }
    cplx& projection(std::size_t n, std::size_t m) {
        return projection_[(n - 1) * n_symbols_ + (m - 1)];
    }

    /// Model vector F h in canonical stacked order.
    cvec apply(const EquivalentChannel& h) const;

    /// Dense materialization for reference checks.
    CMat dense() const;

  private:
    std::size_t n_coherent_;
    std::size_t n_symbols_;
    std::size_t n_rx_;
    cvec direct_;
    cvec projection_;
};

/// Builds the full structured regression matrix for a state hypothesis.
CoefficientMatrix build_coefficients(const UEState& state,
                                     const SubcarrierGrid& grid,
                                     const ArrayConfig& array,
                                     const TxWaveform& waveform);

/// Dense direct-reflection column for a state hypothesis.
cvec build_direct_column(const UEState& state, const SubcarrierGrid& grid,
                         const ArrayConfig& array, const TxWaveform& waveform);

/// Dense materialization of the indirect block (reference/testing path).
CMat build_indirect_block(const UEState& state, const SubcarrierGrid& grid,
                          const ArrayConfig& array, const TxWaveform& waveform);

/**
 * @brief Ground-truth equivalent channel implied by a path set.
 *
 * The direct entry is the first path's complex gain; each indirect entry
 * (n-1)*n_rx + r sums the remaining paths' gain, delay/Doppler phase, and
 * receive steering element on subcarrier n. Applying the coefficient matrix
 * built at the true state to this vector reproduces the noiseless echo.
 */
EquivalentChannel path_equivalent_channel(const SubcarrierGrid& grid,
                                          const ArrayConfig& array,
                                          const PathSet& paths);

struct LsOptions {
    double cond_limit = 1.0e12;
    double ridge_scale = 1.0e-10;
};

struct LsEstimate {
    EquivalentChannel channel;
    bool regularized = false;
    double cond_estimate = 0.0;
};

/**
 * @brief Least-squares channel estimate for fixed state.
 *
 * Solves the normal equations of the structured regression; the indirect
 * block contributes a diagonal, so the factorization is linear in the column
 * count. Applies the trace-scaled ridge on breakdown or when the diagonal
 * conditioning estimate exceeds the limit.
 * @throws SingularSystemError when the system stays indefinite after the ridge.
 */
LsEstimate estimate_channel_ls(const CoefficientMatrix& coeff, const cvec& y,
                               const LsOptions& opts = {});

/// Partial derivatives of the model vector with respect to (x, y, v), one
/// complex vector per parameter in canonical stacked order.
struct JacobianRows {
    cvec d_x;
    cvec d_y;
    cvec d_v;
};

JacobianRows jacobian(const UEState& state, const EquivalentChannel& channel,
                      const SubcarrierGrid& grid, const ArrayConfig& array,
                      const TxWaveform& waveform);

/// Real normal equations of the damped step: solves
/// Re(J J^H) kappa = Re(J conj(r)) for the real parameter update.
std::optional<std::array<double, 3>> solve_gn_normal(const JacobianRows& jac,
                                                     const cvec& residual);

struct GnStep {
    std::array<double, 3> step{};   ///< Undamped update for (x, y, v).
    double residual_norm = 0.0;     ///< Residual norm at the input state.
};

/// Computes the undamped Gauss-Newton update at a state/channel pair.
/// @throws SingularSystemError when the 3x3 normal matrix is singular.
GnStep gauss_newton_step(const UEState& state, const EquivalentChannel& channel,
                         const cvec& y, const SubcarrierGrid& grid,
                         const ArrayConfig& array, const TxWaveform& waveform);

/// Arrival angle of a position estimate in [0, pi].
double extract_aoa(Vec2 position, const ArrayConfig& array);

/// Coarse-to-fine grid search minimizing the channel least-squares residual.
/// @throws std::invalid_argument when the grid admits no candidate.
UEState init_state(const cvec& y, const SubcarrierGrid& grid,
                   const ArrayConfig& array, const TxWaveform& waveform,
                   const GridInitSpec& spec);

struct IterationRecord {
    UEState state;
    double residual_norm = 0.0;  ///< After the channel refit at this state.
    double step_norm = 0.0;      ///< Damped step that produced this state.
};

struct EstimateTrace {
    /// First record is the initialization; residual norms are non-increasing.
    std::vector<IterationRecord> iterations;
    UEState final_state;
    EquivalentChannel channel;
    double final_residual = 0.0;
    std::size_t iterations_used = 0;
    bool converged = false;       ///< Step tolerance met or stationary point.
    bool regularized_ls = false;  ///< Any channel solve needed the ridge.
    bool valid = true;            ///< All quantities stayed finite.
};

/// Full alternating estimation loop on a stacked echo vector.
EstimateTrace run_sensing(const cvec& y, const EstimatorConfig& config,
                          const SubcarrierGrid& grid, const ArrayConfig& array,
                          const TxWaveform& waveform);

}  // namespace isac
