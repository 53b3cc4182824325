// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "isac/ref_impl.hpp"

#include "isac/geometry.hpp"

namespace isac::ref {

cvec synthesize_field(const SubcarrierGrid& grid, const ArrayConfig& array,
                      const PathSet& paths, const TxWaveform& waveform) {
    paths.validate();
    const std::size_t n_m = grid.n_symbols;
    const std::size_t n_r = array.n_rx;
    cvec out(grid.n_coherent * n_m * n_r, cplx{0.0, 0.0});
    for (std::size_t n = 1; n <= grid.n_coherent; ++n) {
        for (std::size_t k = 0; k < paths.paths.size(); ++k) {
            const CMat h = radar_channel(array, grid, paths.paths[k],
                                         paths.departure_rad, paths.doppler_hz, n);
            for (std::size_t m = 1; m <= n_m; ++m) {
                const auto w = waveform.at(n, m);
                // Only the direct return advances across the symbol train;
                // the indirect returns are quasi-static over the burst.
                const cplx slow =
                    (k == 0) ? std::polar(1.0, 2.0 * kPi * paths.doppler_hz *
                                                   grid.symbol_duration_s() *
                                                   static_cast<double>(m - 1))
                             : cplx{1.0, 0.0};
                const std::size_t base = ((n - 1) * n_m + (m - 1)) * n_r;
                for (std::size_t r = 0; r < n_r; ++r) {
                    cplx acc{0.0, 0.0};
                    for (std::size_t t = 0; t < array.n_tx; ++t)
                        acc += h(r, t) * w[t];
                    out[base + r] += slow * acc;
                }
            }
        }
    }
    return out;
}

CMat coefficient_dense(const UEState& state, const SubcarrierGrid& grid,
                       const ArrayConfig& array, const TxWaveform& waveform) {
    return build_coefficients(state, grid, array, waveform).dense();
}

cvec stack_channel(const EquivalentChannel& h) {
    cvec v;
    v.reserve(h.indirect.size() + 1);
    v.push_back(h.direct);
    v.insert(v.end(), h.indirect.begin(), h.indirect.end());
    return v;
}

EquivalentChannel estimate_channel_dense(const CMat& coeff, const cvec& y) {
    const CMat gram = herm_gram(coeff);
    const cvec rhs = herm_apply(coeff, y);
    const cvec x = solve_hpd(gram, rhs, 1.0e12, 1.0e-10,
                             "dense channel least squares");
    EquivalentChannel h;
    h.direct = x.front();
    h.indirect.assign(x.begin() + 1, x.end());
    return h;
}

}  // namespace isac::ref
