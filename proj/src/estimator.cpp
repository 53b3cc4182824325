// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "isac/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isac/geometry.hpp"

namespace isac {

namespace {

constexpr cplx kJ{0.0, 1.0};

double vec_norm(const cvec& v) {
    double s = 0.0;
    for (const auto& e : v) s += std::norm(e);
    return std::sqrt(s);
}

struct StateGeometry {
    double range = 0.0;
    Vec2 unit{0.0, 0.0};
    double cos_aoa = 0.0;
    double delay = 0.0;
    double doppler = 0.0;
};

StateGeometry state_geometry(const UEState& state, const ArrayConfig& array) {
    const Vec2 d = state.position - array.bs_position;
    StateGeometry g;
    g.range = norm(d);
    if (!(g.range > 0.0))
        throw std::invalid_argument("state coincides with the base station");
    g.unit = (1.0 / g.range) * d;
    g.cos_aoa = std::min(1.0, std::max(-1.0, g.unit.x));
    g.delay = 2.0 * g.range / kSpeedOfLight;
    g.doppler = doppler_shift(state.speed_mps, array.carrier_freq_hz);
    return g;
}

void check_dims(const CoefficientMatrix& coeff, const cvec& y) {
    if (y.size() != coeff.rows())
        throw std::invalid_argument("echo vector length does not match grid/array");
}

}  // namespace

cvec CoefficientMatrix::apply(const EquivalentChannel& h) const {
    if (h.indirect.size() != n_coherent_ * n_rx_)
        throw std::invalid_argument("apply: indirect channel length mismatch");
    cvec out(rows(), cplx{0.0, 0.0});
    for (std::size_t n = 1; n <= n_coherent_; ++n) {
        for (std::size_t m = 1; m <= n_symbols_; ++m) {
            const cplx s = projection(n, m);
            const std::size_t base = ((n - 1) * n_symbols_ + (m - 1)) * n_rx_;
            const std::size_t hbase = (n - 1) * n_rx_;
            for (std::size_t r = 0; r < n_rx_; ++r)
                out[base + r] =
                    direct_[base + r] * h.direct + s * h.indirect[hbase + r];
        }
    }
    return out;
}

CMat CoefficientMatrix::dense() const {
    CMat f(rows(), cols());
    for (std::size_t i = 0; i < rows(); ++i) f(i, 0) = direct_[i];
    for (std::size_t n = 1; n <= n_coherent_; ++n)
        for (std::size_t m = 1; m <= n_symbols_; ++m) {
            const cplx s = projection(n, m);
            const std::size_t base = ((n - 1) * n_symbols_ + (m - 1)) * n_rx_;
            for (std::size_t r = 0; r < n_rx_; ++r)
                f(base + r, 1 + (n - 1) * n_rx_ + r) = s;
        }
    return f;
}

CoefficientMatrix build_coefficients(const UEState& state,
                                     const SubcarrierGrid& grid,
                                     const ArrayConfig& array,
                                     const TxWaveform& waveform) {
    if (waveform.n_coherent() != grid.n_coherent ||
        waveform.n_symbols() != grid.n_symbols || waveform.n_tx() != array.n_tx)
        throw std::invalid_argument("waveform dimensions do not match grid/array");
    const StateGeometry geo = state_geometry(state, array);
    const double aoa = std::acos(geo.cos_aoa);
    // Direct-return slow-time phase step between consecutive symbols. The
    // indirect block carries no such step: those returns are modeled as
    // quasi-static over the burst.
    const double slow_step = 2.0 * kPi * geo.doppler * grid.symbol_duration_s();

    CoefficientMatrix coeff(grid.n_coherent, grid.n_symbols, array.n_rx);

#pragma omp parallel for schedule(static)
    for (std::size_t n = 1; n <= grid.n_coherent; ++n) {
        const double f_n = grid.baseband_freqs[n - 1];
        const cplx phase =
            std::polar(1.0, -2.0 * kPi * (f_n - geo.doppler) * geo.delay);
        const cvec a = steering_tx_at(array, f_n, aoa);
        const cvec b = steering_rx_at(array, f_n, aoa);
        for (std::size_t m = 1; m <= grid.n_symbols; ++m) {
            const auto w = waveform.at(n, m);
            cplx proj{0.0, 0.0};
            for (std::size_t t = 0; t < array.n_tx; ++t)
                proj += std::conj(a[t]) * w[t];
            coeff.projection(n, m) = proj;
            const cplx slow =
                std::polar(1.0, slow_step * static_cast<double>(m - 1));
            const cplx factor = phase * slow * proj;
            const std::size_t base =
                ((n - 1) * grid.n_symbols + (m - 1)) * array.n_rx;
            for (std::size_t r = 0; r < array.n_rx; ++r)
                coeff.direct()[base + r] = factor * b[r];
        }
    }
    return coeff;
}

cvec build_direct_column(const UEState& state, const SubcarrierGrid& grid,
                         const ArrayConfig& array, const TxWaveform& waveform) {
    return build_coefficients(state, grid, array, waveform).direct();
}

CMat build_indirect_block(const UEState& state, const SubcarrierGrid& grid,
                          const ArrayConfig& array, const TxWaveform& waveform) {
    const CoefficientMatrix coeff = build_coefficients(state, grid, array, waveform);
    CMat block(coeff.rows(), coeff.cols() - 1);
    for (std::size_t n = 1; n <= grid.n_coherent; ++n)
        for (std::size_t m = 1; m <= grid.n_symbols; ++m) {
            const cplx s = coeff.projection(n, m);
            const std::size_t base =
                ((n - 1) * grid.n_symbols + (m - 1)) * array.n_rx;
            for (std::size_t r = 0; r < array.n_rx; ++r)
                block(base + r, (n - 1) * array.n_rx + r) = s;
        }
    return block;
}

EquivalentChannel path_equivalent_channel(const SubcarrierGrid& grid,
                                          const ArrayConfig& array,
                                          const PathSet& paths) {
    paths.validate();
    EquivalentChannel h;
    h.direct = paths.paths.front().gain;
    h.indirect.assign(grid.n_coherent * array.n_rx, cplx{0.0, 0.0});
    for (std::size_t n = 1; n <= grid.n_coherent; ++n) {
        const double f_n = grid.baseband_freqs[n - 1];
        for (std::size_t k = 1; k < paths.paths.size(); ++k) {
            const auto& path = paths.paths[k];
            const cplx scale =
                path.gain * std::polar(1.0, -2.0 * kPi *
                                                (f_n - paths.doppler_hz) *
                                                path.delay_s);
            const cvec b = steering_rx_at(array, f_n, path.aoa_rad);
            for (std::size_t r = 0; r < array.n_rx; ++r)
                h.indirect[(n - 1) * array.n_rx + r] += scale * b[r];
        }
    }
    return h;
}

LsEstimate estimate_channel_ls(const CoefficientMatrix& coeff, const cvec& y,
                               const LsOptions& opts) {
    check_dims(coeff, y);
    const std::size_t n_c = coeff.n_coherent();
    const std::size_t n_m = coeff.n_symbols();
    const std::size_t n_r = coeff.n_rx();
    const std::size_t n_ind = n_c * n_r;
    const cvec& g = coeff.direct();

    // Normal equations have arrow structure with the dense column ordered
    // last: diagonal d_j from the indirect block, border u_j against the
    // direct column, corner a00.
    std::vector<double> diag(n_ind, 0.0);
    cvec border(n_ind, cplx{0.0, 0.0});
    cvec rhs_ind(n_ind, cplx{0.0, 0.0});
    std::vector<double> a00_part(n_c, 0.0);
    cvec rhs_dir_part(n_c, cplx{0.0, 0.0});

#pragma omp parallel for schedule(static)
    for (std::size_t n = 1; n <= n_c; ++n) {
        double ssum = 0.0;
        for (std::size_t m = 1; m <= n_m; ++m)
            ssum += std::norm(coeff.projection(n, m));
        double a00_local = 0.0;
        cplx rhs_dir_local{0.0, 0.0};
        for (std::size_t r = 0; r < n_r; ++r) {
            const std::size_t j = (n - 1) * n_r + r;
            diag[j] = ssum;
            cplx u{0.0, 0.0};
            cplx c{0.0, 0.0};
            for (std::size_t m = 1; m <= n_m; ++m) {
                const std::size_t i = ((n - 1) * n_m + (m - 1)) * n_r + r;
                const cplx s = coeff.projection(n, m);
                u += std::conj(s) * g[i];
                c += std::conj(s) * y[i];
                a00_local += std::norm(g[i]);
                rhs_dir_local += std::conj(g[i]) * y[i];
            }
            border[j] = u;
            rhs_ind[j] = c;
        }
        // a00/rhs accumulate every antenna; the r loop above visits each
        // sample exactly once.
        a00_part[n - 1] = a00_local;
        rhs_dir_part[n - 1] = rhs_dir_local;
    }
    // Fixed-order reduction keeps the result independent of thread count.
    double a00 = 0.0;
    cplx rhs_dir{0.0, 0.0};
    for (std::size_t n = 0; n < n_c; ++n) {
        a00 += a00_part[n];
        rhs_dir += rhs_dir_part[n];
    }

    double trace = a00;
    for (const double d : diag) trace += d;
    const double dim = static_cast<double>(n_ind + 1);

    const auto factor_and_solve =
        [&](double ridge, LsEstimate& out) -> bool {
        // Arrow Cholesky: L_jj = sqrt(d_j), last row L_bj = conj(u_j)/L_jj,
        // corner pivot a00 - sum |u_j|^2 / d_j.
        double dmin = std::numeric_limits<double>::infinity();
        double dmax = 0.0;
        double corner = a00 + ridge;
        cvec z(n_ind, cplx{0.0, 0.0});
        cplx z_dir = rhs_dir;
        std::vector<double> ljj(n_ind, 0.0);
        cvec lbj(n_ind, cplx{0.0, 0.0});
        for (std::size_t j = 0; j < n_ind; ++j) {
            const double dj = diag[j] + ridge;
            if (!(dj > 0.0) || !std::isfinite(dj)) return false;
            ljj[j] = std::sqrt(dj);
            lbj[j] = std::conj(border[j]) / ljj[j];
            corner -= std::norm(lbj[j]);
            dmin = std::min(dmin, ljj[j]);
            dmax = std::max(dmax, ljj[j]);
        }
        if (!(corner > 0.0) || !std::isfinite(corner)) return false;
        const double lcc = std::sqrt(corner);
        dmin = std::min(dmin, lcc);
        dmax = std::max(dmax, lcc);
        out.cond_estimate = (dmax / dmin) * (dmax / dmin);

        for (std::size_t j = 0; j < n_ind; ++j) {
            z[j] = rhs_ind[j] / ljj[j];
            z_dir -= lbj[j] * z[j];
        }
        z_dir /= lcc;
        const cplx h_dir = z_dir / lcc;
        out.channel.direct = h_dir;
        out.channel.indirect.assign(n_ind, cplx{0.0, 0.0});
        for (std::size_t j = 0; j < n_ind; ++j)
            out.channel.indirect[j] = (z[j] - std::conj(lbj[j]) * h_dir) / ljj[j];
        return true;
    };

    LsEstimate est;
    if (factor_and_solve(0.0, est) && est.cond_estimate <= opts.cond_limit)
        return est;
    const double ridge = opts.ridge_scale * trace / dim;
    LsEstimate reg;
    reg.regularized = true;
    if (!factor_and_solve(ridge, reg))
        throw SingularSystemError(
            "channel least squares: normal matrix not positive definite");
    return reg;
}

JacobianRows jacobian(const UEState& state, const EquivalentChannel& channel,
                      const SubcarrierGrid& grid, const ArrayConfig& array,
                      const TxWaveform& waveform) {
    if (channel.indirect.size() != grid.n_coherent * array.n_rx)
        throw std::invalid_argument("jacobian: indirect channel length mismatch");
    const StateGeometry geo = state_geometry(state, array);
    const double aoa = std::acos(geo.cos_aoa);

    // Chain-rule pieces shared by every sample.
    const Vec2 grad_cos = (1.0 / geo.range) *
                          Vec2{1.0 - geo.cos_aoa * geo.unit.x,
                               -geo.cos_aoa * geo.unit.y};
    const Vec2 grad_delay = (2.0 / kSpeedOfLight) * geo.unit;
    const double ddoppler_dv = 2.0 * array.carrier_freq_hz / kSpeedOfLight;

    const std::size_t n_c = grid.n_coherent;
    const std::size_t n_m = grid.n_symbols;
    const std::size_t n_r = array.n_rx;
    const double t_sym = grid.symbol_duration_s();
    const double slow_step = 2.0 * kPi * geo.doppler * t_sym;
    JacobianRows jac;
    jac.d_x.assign(n_c * n_m * n_r, cplx{0.0, 0.0});
    jac.d_y.assign(n_c * n_m * n_r, cplx{0.0, 0.0});
    jac.d_v.assign(n_c * n_m * n_r, cplx{0.0, 0.0});

#pragma omp parallel for schedule(static)
    for (std::size_t n = 1; n <= n_c; ++n) {
        const double f_n = grid.baseband_freqs[n - 1];
        const double psi = 2.0 * kPi *
                           ((f_n + array.carrier_freq_hz) / kSpeedOfLight) *
                           array.spacing_m();
        const cplx phase =
            std::polar(1.0, -2.0 * kPi * (f_n - geo.doppler) * geo.delay);
        const cvec a = steering_tx_at(array, f_n, aoa);
        const cvec b = steering_rx_at(array, f_n, aoa);
        const cplx delay_coeff = -kJ * 2.0 * kPi * (f_n - geo.doppler);
        for (std::size_t m = 1; m <= n_m; ++m) {
            const auto w = waveform.at(n, m);
            cplx proj{0.0, 0.0};
            cplx proj_ramp{0.0, 0.0};  // element-index-weighted projection
            for (std::size_t t = 0; t < array.n_tx; ++t) {
                const cplx term = std::conj(a[t]) * w[t];
                proj += term;
                proj_ramp += static_cast<double>(t) * term;
            }
            const cplx dproj_dcos = kJ * psi * proj_ramp;
            const cplx slow =
                std::polar(1.0, slow_step * static_cast<double>(m - 1));
            // The direct phase depends on speed through both the fast-time
            // Doppler offset and the slow-time symbol progression.
            const cplx doppler_coeff =
                kJ * 2.0 * kPi * ddoppler_dv *
                (geo.delay + t_sym * static_cast<double>(m - 1));
            const std::size_t base = ((n - 1) * n_m + (m - 1)) * n_r;
            const std::size_t hbase = (n - 1) * n_r;
            for (std::size_t r = 0; r < n_r; ++r) {
                const cplx dr_part = channel.direct * phase * slow * b[r];
                const cplx model_dr = dr_part * proj;
                // Direct part varies through the delay phase and both
                // steering factors; the indirect part only through the
                // transmit projection.
                const cplx db_coeff = -kJ * psi * static_cast<double>(r);
                const cplx with_proj = dr_part + channel.indirect[hbase + r];
                const std::size_t i = base + r;
                const cplx common_pos =
                    model_dr * delay_coeff;  // times grad_delay component
                const cplx common_ang =
                    model_dr * db_coeff + with_proj * dproj_dcos;
                jac.d_x[i] = common_pos * grad_delay.x + common_ang * grad_cos.x;
                jac.d_y[i] = common_pos * grad_delay.y + common_ang * grad_cos.y;
                jac.d_v[i] = model_dr * doppler_coeff;
            }
        }
    }
    return jac;
}

std::optional<std::array<double, 3>> solve_gn_normal(const JacobianRows& jac,
                                                     const cvec& residual) {
    const std::size_t n = residual.size();
    if (jac.d_x.size() != n || jac.d_y.size() != n || jac.d_v.size() != n)
        throw std::invalid_argument("solve_gn_normal: dimension mismatch");
    const cvec* rows[3] = {&jac.d_x, &jac.d_y, &jac.d_v};
    std::array<double, 9> a{};
    std::array<double, 3> b{};
    for (int p = 0; p < 3; ++p) {
        for (int q = p; q < 3; ++q) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                acc += (std::conj((*rows[p])[i]) * (*rows[q])[i]).real();
            a[3 * p + q] = acc;
            a[3 * q + p] = acc;
        }
        double rb = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            rb += (std::conj((*rows[p])[i]) * residual[i]).real();
        b[p] = rb;
    }
    return solve_sym3(a, b);
}

namespace {

// Removes the component of each Jacobian row that the channel refit would
// absorb. Without this the normal matrix overstates curvature along
// refit-compensable directions and the damped steps creep.
JacobianRows project_off_span(const JacobianRows& jac,
                              const CoefficientMatrix& coeff,
                              const LsOptions& opts) {
    JacobianRows out;
    const cvec* in[3] = {&jac.d_x, &jac.d_y, &jac.d_v};
    cvec* res[3] = {&out.d_x, &out.d_y, &out.d_v};
    for (int p = 0; p < 3; ++p) {
        const LsEstimate fit = estimate_channel_ls(coeff, *in[p], opts);
        const cvec span_part = coeff.apply(fit.channel);
        res[p]->resize(in[p]->size());
        for (std::size_t i = 0; i < in[p]->size(); ++i)
            (*res[p])[i] = (*in[p])[i] - span_part[i];
    }
    return out;
}

}  // namespace

GnStep gauss_newton_step(const UEState& state, const EquivalentChannel& channel,
                         const cvec& y, const SubcarrierGrid& grid,
                         const ArrayConfig& array, const TxWaveform& waveform) {
    const CoefficientMatrix coeff = build_coefficients(state, grid, array, waveform);
    check_dims(coeff, y);
    const cvec model = coeff.apply(channel);
    cvec residual(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - model[i];
    const JacobianRows jac = jacobian(state, channel, grid, array, waveform);
    const JacobianRows reduced = project_off_span(jac, coeff, LsOptions{});
    const auto step = solve_gn_normal(reduced, residual);
    if (!step)
        throw SingularSystemError("state update: 3x3 normal matrix singular");
    GnStep out;
    out.step = *step;
    out.residual_norm = vec_norm(residual);
    return out;
}

double extract_aoa(Vec2 position, const ArrayConfig& array) {
    return direct_path_geometry(position, array.bs_position).aoa_rad;
}

namespace {

double ls_residual_norm(const UEState& state, const cvec& y,
                        const SubcarrierGrid& grid, const ArrayConfig& array,
                        const TxWaveform& waveform, const LsOptions& opts) {
    const CoefficientMatrix coeff = build_coefficients(state, grid, array, waveform);
    const LsEstimate est = estimate_channel_ls(coeff, y, opts);
    const cvec model = coeff.apply(est.channel);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::norm(y[i] - model[i]);
    return std::sqrt(s);
}

UEState state_from_polar(const ArrayConfig& array, double range, double cos_aoa,
                         double speed) {
    const double c = std::min(1.0, std::max(-1.0, cos_aoa));
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    UEState st;
    st.position = array.bs_position + range * Vec2{c, s};
    st.speed_mps = speed;
    return st;
}

}  // namespace

UEState init_state(const cvec& y, const SubcarrierGrid& grid,
                   const ArrayConfig& array, const TxWaveform& waveform,
                   const GridInitSpec& spec) {
    if (spec.points_per_axis < 1 || spec.speeds.empty() ||
        !(spec.radius_m > 0.0) || !(spec.min_distance_m > 0.0) ||
        spec.min_distance_m > spec.radius_m)
        throw std::invalid_argument("init_state: empty or invalid search grid");

    struct Candidate {
        double range, cos_aoa, speed;
    };
    const auto axis_value = [](double lo, double hi, std::size_t i,
                               std::size_t count) {
        if (count == 1) return 0.5 * (lo + hi);
        return lo + (hi - lo) * static_cast<double>(i) /
                        static_cast<double>(count - 1);
    };

    const auto search = [&](const std::vector<Candidate>& cands) {
        std::vector<double> residuals(cands.size(), 0.0);
        const LsOptions opts;
#pragma omp parallel for schedule(static)
        for (std::size_t i = 0; i < cands.size(); ++i) {
            const UEState st = state_from_polar(array, cands[i].range,
                                                cands[i].cos_aoa, cands[i].speed);
            residuals[i] = ls_residual_norm(st, y, grid, array, waveform, opts);
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < cands.size(); ++i)
            if (residuals[i] < residuals[best]) best = i;
        return cands[best];
    };

    // A start exactly on the array axis has an identically zero cross-axis
    // gradient by symmetry and the descent can never leave it; keep every
    // candidate strictly inside the open cosine interval.
    const double cos_cap = 1.0 - 1.0e-3;

    const std::size_t g = spec.points_per_axis;
    std::vector<Candidate> coarse;
    coarse.reserve(g * g * spec.speeds.size());
    for (std::size_t ir = 0; ir < g; ++ir) {
        const double range = axis_value(spec.min_distance_m, spec.radius_m, ir, g);
        for (std::size_t ic = 0; ic < g; ++ic) {
            const double cos_aoa =
                std::clamp(axis_value(-1.0, 1.0, ic, g), -cos_cap, cos_cap);
            for (const double v : spec.speeds)
                coarse.push_back({range, cos_aoa, v});
        }
    }
    if (coarse.empty())
        throw std::invalid_argument("init_state: empty or invalid search grid");
    Candidate best = search(coarse);

    if (spec.refine_points > 1 && g > 1) {
        const double range_step =
            (spec.radius_m - spec.min_distance_m) / static_cast<double>(g - 1);
        const double cos_step = 2.0 / static_cast<double>(g - 1);
        std::vector<Candidate> fine;
        fine.reserve(spec.refine_points * spec.refine_points);
        for (std::size_t ir = 0; ir < spec.refine_points; ++ir) {
            const double range = std::clamp(
                axis_value(best.range - range_step, best.range + range_step, ir,
                           spec.refine_points),
                spec.min_distance_m, spec.radius_m);
            for (std::size_t ic = 0; ic < spec.refine_points; ++ic) {
                const double cos_aoa = std::clamp(
                    axis_value(best.cos_aoa - cos_step, best.cos_aoa + cos_step,
                               ic, spec.refine_points),
                    -cos_cap, cos_cap);
                fine.push_back({range, cos_aoa, best.speed});
            }
        }
        best = search(fine);
    }
    return state_from_polar(array, best.range, best.cos_aoa, best.speed);
}

namespace {

// Alternating descent from one start: refit the channel, take a damped
// state step against the refit-reduced Jacobian, repeat. Every line-search
// candidate is scored with its own channel refit; scoring against the
// carried channel would reject any step large enough to need a channel
// adjustment and the iteration would creep.
EstimateTrace descend_from(const UEState& start, const cvec& y,
                           const EstimatorConfig& config,
                           const SubcarrierGrid& grid, const ArrayConfig& array,
                           const TxWaveform& waveform, const LsOptions& opts) {
    EstimateTrace trace;
    UEState state = start;

    CoefficientMatrix coeff = build_coefficients(state, grid, array, waveform);
    LsEstimate ls = estimate_channel_ls(coeff, y, opts);
    trace.regularized_ls = ls.regularized;
    cvec residual(y.size());
    const auto refresh_residual = [&]() {
        const cvec model = coeff.apply(ls.channel);
        for (std::size_t i = 0; i < y.size(); ++i)
            residual[i] = y[i] - model[i];
        return vec_norm(residual);
    };
    double res_norm = refresh_residual();
    trace.iterations.push_back({state, res_norm, 0.0});

    const double min_range = 1e-6;
    for (std::size_t it = 1; it <= config.max_iterations; ++it) {
        std::array<double, 3> kappa{};
        try {
            const JacobianRows jac = jacobian(state, ls.channel, grid, array, waveform);
            const JacobianRows reduced = project_off_span(jac, coeff, opts);
            const auto solved = solve_gn_normal(reduced, residual);
            if (!solved) break;  // stationary for this channel fit
            kappa = *solved;
        } catch (const SingularSystemError&) {
            break;
        }

        // Halving line search: accept the first non-increasing candidate.
        double damping = 1.0;
        bool accepted = false;
        for (std::size_t bt = 0; bt <= config.max_backtracks; ++bt) {
            UEState cand = state;
            cand.position.x += damping * kappa[0];
            cand.position.y += damping * kappa[1];
            cand.speed_mps += damping * kappa[2];
            if (norm(cand.position - array.bs_position) > min_range) {
                CoefficientMatrix cf =
                    build_coefficients(cand, grid, array, waveform);
                bool fit_ok = true;
                LsEstimate cand_ls;
                try {
                    cand_ls = estimate_channel_ls(cf, y, opts);
                } catch (const SingularSystemError&) {
                    fit_ok = false;
                }
                if (fit_ok) {
                    const cvec model = cf.apply(cand_ls.channel);
                    double s = 0.0;
                    for (std::size_t i = 0; i < y.size(); ++i)
                        s += std::norm(y[i] - model[i]);
                    const double cand_res = std::sqrt(s);
                    if (cand_res <= res_norm && std::isfinite(cand_res)) {
                        state = cand;
                        coeff = std::move(cf);
                        ls = std::move(cand_ls);
                        res_norm = cand_res;
                        accepted = true;
                        break;
                    }
                }
            }
            damping *= 0.5;
        }
        if (!accepted) {
            trace.converged = true;  // no descent direction left
            break;
        }

        const double step_norm =
            damping * std::sqrt(kappa[0] * kappa[0] + kappa[1] * kappa[1] +
                                kappa[2] * kappa[2]);
        trace.regularized_ls = trace.regularized_ls || ls.regularized;
        refresh_residual();
        trace.iterations.push_back({state, res_norm, step_norm});
        trace.iterations_used = it;
        if (step_norm < config.step_tolerance) {
            trace.converged = true;
            break;
        }
    }

    // Mirror-image states across the array axis are indistinguishable;
    // report the upper half plane representative.
    if (state.position.y < array.bs_position.y)
        state.position.y = 2.0 * array.bs_position.y - state.position.y;

    trace.final_state = state;
    trace.channel = std::move(ls.channel);
    trace.final_residual = res_norm;
    if (!std::isfinite(res_norm) || !std::isfinite(state.position.x) ||
        !std::isfinite(state.position.y) || !std::isfinite(state.speed_mps))
        trace.valid = false;
    return trace;
}

}  // namespace

EstimateTrace run_sensing(const cvec& y, const EstimatorConfig& config,
                          const SubcarrierGrid& grid, const ArrayConfig& array,
                          const TxWaveform& waveform) {
    config.validate();
    const LsOptions opts{config.cond_limit, config.ridge_scale};
    if (y.size() != grid.n_coherent * grid.n_symbols * array.n_rx)
        throw std::invalid_argument("echo vector length does not match grid/array");

    const UEState start = config.init
                              ? *config.init
                              : init_state(y, grid, array, waveform, config.grid_init);
    EstimateTrace best = descend_from(start, y, config, grid, array, waveform, opts);

    // A half-wavelength line array barely separates the two endfire cones,
    // so a grid start can land on the wrong side of the array normal. A
    // second descent from the front-back mirrored start resolves the sign by
    // final misfit. An explicit caller-provided start is honored as-is.
    if (!config.init &&
        std::abs(start.position.x - array.bs_position.x) > 1e-9) {
        UEState flipped = start;
        flipped.position.x = 2.0 * array.bs_position.x - start.position.x;
        const EstimateTrace alt =
            descend_from(flipped, y, config, grid, array, waveform, opts);
        if (alt.valid && (!best.valid || alt.final_residual < best.final_residual))
            best = alt;
    }
    return best;
}

}  // namespace isac
