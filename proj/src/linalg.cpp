// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "isac/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace isac {

cvec matvec(const CMat& a, const cvec& x) {
    if (x.size() != a.cols())
        throw std::invalid_argument("matvec: dimension mismatch");
    cvec y(a.rows(), cplx{0.0, 0.0});
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

CMat herm_gram(const CMat& a) {
    CMat g(a.cols(), a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) {
        for (std::size_t k = j; k < a.cols(); ++k) {
            cplx acc{0.0, 0.0};
            for (std::size_t i = 0; i < a.rows(); ++i)
                acc += std::conj(a(i, j)) * a(i, k);
            g(j, k) = acc;
            g(k, j) = std::conj(acc);
        }
    }
    return g;
}

cvec herm_apply(const CMat& a, const cvec& y) {
    if (y.size() != a.rows())
        throw std::invalid_argument("herm_apply: dimension mismatch");
    cvec b(a.cols(), cplx{0.0, 0.0});
    for (std::size_t j = 0; j < a.cols(); ++j) {
        cplx acc{0.0, 0.0};
        for (std::size_t i = 0; i < a.rows(); ++i)
            acc += std::conj(a(i, j)) * y[i];
        b[j] = acc;
    }
    return b;
}

namespace {

// In-place lower Cholesky; returns false on a non-positive pivot. On success
// fills the squared diagonal ratio as a conditioning estimate.
bool cholesky(CMat& a, double* cond_estimate) {
    const std::size_t n = a.rows();
    double dmin = 0.0, dmax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        cplx diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= a(j, k) * std::conj(a(j, k));
        const double d = diag.real();
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        a(j, j) = ljj;
        dmin = (j == 0) ? ljj : std::min(dmin, ljj);
        dmax = (j == 0) ? ljj : std::max(dmax, ljj);
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx v = a(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= a(i, k) * std::conj(a(j, k));
            a(i, j) = v / ljj;
        }
    }
    if (cond_estimate != nullptr) {
        const double r = (dmin > 0.0) ? dmax / dmin : 0.0;
        *cond_estimate = r * r;
    }
    return true;
}

cvec cholesky_solve(const CMat& l, const cvec& b) {
    const std::size_t n = l.rows();
    cvec x = b;
    for (std::size_t i = 0; i < n; ++i) {
        cplx v = x[i];
        for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * x[k];
        x[i] = v / l(i, i);
    }
    for (std::size_t ii = n; ii > 0; --ii) {
        const std::size_t i = ii - 1;
        cplx v = x[i];
        for (std::size_t k = i + 1; k < n; ++k) v -= std::conj(l(k, i)) * x[k];
        x[i] = v / l(i, i);
    }
    return x;
}

}  // namespace

cvec solve_hpd(CMat a, const cvec& b, double cond_limit, double ridge_scale,
               const char* context, HpdSolveInfo* info) {
    if (a.rows() != a.cols() || b.size() != a.rows())
        throw std::invalid_argument("solve_hpd: dimension mismatch");
    const std::size_t n = a.rows();
    double trace = 0.0;
    for (std::size_t j = 0; j < n; ++j) trace += a(j, j).real();

    CMat factor = a;
    double cond = 0.0;
    bool ok = cholesky(factor, &cond);
    bool regularized = false;
    if (!ok || cond > cond_limit) {
        const double ridge = ridge_scale * trace / static_cast<double>(n);
        factor = a;
        for (std::size_t j = 0; j < n; ++j) factor(j, j) += ridge;
        regularized = true;
        ok = cholesky(factor, &cond);
        if (!ok)
            throw SingularSystemError(std::string(context) +
                                      ": normal matrix not positive definite");
    }
    if (info != nullptr) {
        info->regularized = regularized;
        info->cond_estimate = cond;
    }
    return cholesky_solve(factor, b);
}

std::optional<std::array<double, 3>> solve_sym3(const std::array<double, 9>& a,
                                                const std::array<double, 3>& b) {
    double m[3][4] = {{a[0], a[1], a[2], b[0]},
                      {a[3], a[4], a[5], b[1]},
                      {a[6], a[7], a[8], b[2]}};
    double scale = 0.0;
    for (const auto& row : m)
        for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(row[j]));
    if (!(scale > 0.0)) return std::nullopt;
    const double tiny = 1e-14 * scale;

    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int i = col + 1; i < 3; ++i)
            if (std::abs(m[i][col]) > std::abs(m[pivot][col])) pivot = i;
        if (std::abs(m[pivot][col]) <= tiny) return std::nullopt;
        if (pivot != col)
            for (int j = 0; j < 4; ++j) std::swap(m[col][j], m[pivot][j]);
        for (int i = col + 1; i < 3; ++i) {
            const double f = m[i][col] / m[col][col];
            for (int j = col; j < 4; ++j) m[i][j] -= f * m[col][j];
        }
    }
    std::array<double, 3> x{};
    for (int i = 2; i >= 0; --i) {
        double v = m[i][3];
        for (int j = i + 1; j < 3; ++j) v -= m[i][j] * x[j];
        x[i] = v / m[i][i];
    }
    return x;
}

}  // namespace isac
