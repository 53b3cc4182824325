// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

/**
 * @file linalg.hpp
 * @brief Small dense complex linear algebra: matrices, Hermitian products,
 *        Cholesky solves with a trace-scaled ridge fallback, and a real 3x3
 *        symmetric solver.
 *
 * Sizes are tiny (at most a few hundred per dimension), so everything is
 * plain dense row-major storage without blocking.
 */

#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "isac/types.hpp"

namespace isac {

/// Dense row-major complex matrix.
class CMat {
  public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    cplx operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    cvec& data() { return data_; }
    const cvec& data() const { return data_; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    cvec data_;
};

/// y = A x.
cvec matvec(const CMat& a, const cvec& x);

/// A^H A for a tall dense matrix.
CMat herm_gram(const CMat& a);

/// A^H y.
cvec herm_apply(const CMat& a, const cvec& y);

/// Raised when a linear subproblem is numerically singular; the message names
/// the subproblem that failed.
struct SingularSystemError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HpdSolveInfo {
    bool regularized = false;
    double cond_estimate = 0.0;  ///< Diagonal-based estimate from the factor.
};

/**
 * @brief Solves the Hermitian positive-definite system A x = b by Cholesky.
 *
 * When the factor breaks down or its diagonal conditioning estimate exceeds
 * cond_limit, adds ridge_scale * trace(A)/dim to the diagonal and retries
 * once; a second breakdown raises SingularSystemError naming `context`.
 */
cvec solve_hpd(CMat a, const cvec& b, double cond_limit, double ridge_scale,
               const char* context, HpdSolveInfo* info = nullptr);

/// Solves the real symmetric 3x3 system by pivoted elimination; empty result
/// when the pivot falls below a relative threshold.
std::optional<std::array<double, 3>> solve_sym3(const std::array<double, 9>& a,
                                                const std::array<double, 3>& b);

}  // namespace isac
