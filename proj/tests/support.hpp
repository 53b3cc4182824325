// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

/**
 * @file support.hpp
 * @brief Shared oracles and builders for the test suite. The solvers here are
 *        deliberately independent of the library implementations so they can
 *        serve as cross-checks: dense Gauss-Jordan elimination instead of the
 *        structured factorizations, and plain central differences instead of
 *        the analytic Jacobian.
 */
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "isac/estimator.hpp"
#include "isac/linalg.hpp"
#include "isac/types.hpp"

namespace isac::test {

/// Dense complex linear solve by Gauss-Jordan elimination with partial
/// pivoting. Square systems only.
inline cvec gauss_jordan_solve(CMat a, cvec b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n)
        throw std::invalid_argument("gauss_jordan_solve: shape mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a(col, col));
        for (std::size_t row = col + 1; row < n; ++row) {
            const double mag = std::abs(a(row, col));
            if (mag > best) {
                best = mag;
                pivot = row;
            }
        }
        if (!(best > 0.0))
            throw std::runtime_error("gauss_jordan_solve: singular matrix");
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
            std::swap(b[col], b[pivot]);
        }
        const cplx inv = cplx{1.0, 0.0} / a(col, col);
        for (std::size_t j = 0; j < n; ++j) a(col, j) *= inv;
        b[col] *= inv;
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col) continue;
            const cplx factor = a(row, col);
            if (factor == cplx{0.0, 0.0}) continue;
            for (std::size_t j = 0; j < n; ++j) a(row, j) -= factor * a(col, j);
            b[row] -= factor * b[col];
        }
    }
    return b;
}

/// Least-squares oracle: forms the normal equations of a dense tall matrix by
/// direct summation and solves them with Gauss-Jordan elimination.
inline cvec ls_oracle(const CMat& f, const cvec& y) {
    const std::size_t rows = f.rows();
    const std::size_t cols = f.cols();
    if (y.size() != rows) throw std::invalid_argument("ls_oracle: shape mismatch");
    CMat gram(cols, cols);
    cvec rhs(cols, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < cols; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            cplx acc{0.0, 0.0};
            for (std::size_t r = 0; r < rows; ++r)
                acc += std::conj(f(r, i)) * f(r, j);
            gram(i, j) = acc;
        }
        cplx acc{0.0, 0.0};
        for (std::size_t r = 0; r < rows; ++r) acc += std::conj(f(r, i)) * y[r];
        rhs[i] = acc;
    }
    return gauss_jordan_solve(gram, rhs);
}

/// Largest entrywise magnitude of a complex vector.
inline double linf(const cvec& v) {
    double m = 0.0;
    for (const cplx& c : v) m = std::max(m, std::abs(c));
    return m;
}

/// Euclidean norm of a complex vector.
inline double norm2(const cvec& v) {
    double s = 0.0;
    for (const cplx& c : v) s += std::norm(c);
    return std::sqrt(s);
}

/// Relative deviation of two vectors against the larger norm.
inline double rel_dev(const cvec& a, const cvec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("rel_dev: size mismatch");
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) diff += std::norm(a[i] - b[i]);
    const double scale = std::max(norm2(a), norm2(b));
    return scale > 0.0 ? std::sqrt(diff) / scale : std::sqrt(diff);
}

/// Stacks an equivalent channel the same way the estimator orders columns:
/// direct gain first, then the indirect entries.
inline cvec stack(const EquivalentChannel& h) {
    cvec out;
    out.reserve(1 + h.indirect.size());
    out.push_back(h.direct);
    out.insert(out.end(), h.indirect.begin(), h.indirect.end());
    return out;
}

/// Central-difference Jacobian of the model vector F(state) h at fixed h.
/// Perturbs one coordinate of (x, y, v) at a time.
inline cvec fd_model_derivative(const UEState& state,
                                const EquivalentChannel& channel,
                                const SubcarrierGrid& grid,
                                const ArrayConfig& array,
                                const TxWaveform& waveform, int coordinate,
                                double step) {
    auto model_at = [&](const UEState& s) {
        return build_coefficients(s, grid, array, waveform).apply(channel);
    };
    UEState plus = state;
    UEState minus = state;
    switch (coordinate) {
        case 0:
            plus.position.x += step;
            minus.position.x -= step;
            break;
        case 1:
            plus.position.y += step;
            minus.position.y -= step;
            break;
        default:
            plus.speed_mps += step;
            minus.speed_mps -= step;
            break;
    }
    const cvec hi = model_at(plus);
    const cvec lo = model_at(minus);
    cvec out(hi.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (hi[i] - lo[i]) / (2.0 * step);
    return out;
}

/// Small grid/array pair for structure tests that do not need full size.
struct SmallSetup {
    SubcarrierGrid grid;
    ArrayConfig array;
};

inline SmallSetup small_setup(std::size_t n_coherent = 3,
                              std::size_t n_symbols = 4, std::size_t n_tx = 4,
                              std::size_t n_rx = 3) {
    SmallSetup s;
    s.grid.n_coherent = n_coherent;
    s.grid.n_symbols = n_symbols;
    s.grid.rebuild();
    s.array.n_tx = n_tx;
    s.array.n_rx = n_rx;
    return s;
}

}  // namespace isac::test
