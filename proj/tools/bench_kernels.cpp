// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

/**
 * @file bench_kernels.cpp
 * @brief Benchmarks the production kernels against their serial references.
 *
 * Each kernel runs in two lanes on identical inputs: the serial reference
 * (explicit channel matrices, dense linear algebra) and the production path
 * (threaded synthesis, structure-exploiting solves). The benchmark reports
 * per-lane timings and the maximum relative deviation, and fails when the
 * lanes disagree, so it doubles as an integration check.
 */

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "isac/estimator.hpp"
#include "isac/ref_impl.hpp"
#include "isac/scenario.hpp"
#include "isac/waveform.hpp"

namespace {

using isac::cplx;
using isac::cvec;

double time_best_ms(std::size_t reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (std::size_t i = 0; i < reps; ++i) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const auto stop = std::chrono::steady_clock::now();
        const double ms =
            std::chrono::duration<double, std::milli>(stop - start).count();
        if (ms < best) best = ms;
    }
    return best;
}

double max_rel_dev(const cvec& a, const cvec& b) {
    double scale = 0.0;
    for (const cplx& v : a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    double dev = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        dev = std::max(dev, std::abs(a[i] - b[i]) / scale);
    return dev;
}

void report(const char* name, double ref_ms, double prod_ms, double dev) {
    std::printf("%-26s ref %9.3f ms   prod %9.3f ms   speedup %6.2fx   "
                "max rel dev %.3e\n",
                name, ref_ms, prod_ms, ref_ms / prod_ms, dev);
}

}  // namespace

int main() {
    isac::ScenarioConfig config;
    config.echo_gain = 1.0e-3;
    isac::RandomStream scenario_rng(isac::mix_seed(7, 1, 0));
    const isac::Scenario scenario = isac::sample_scenario(config, scenario_rng);
    const isac::TxWaveform waveform =
        isac::TxWaveform::phase_alternating(config.grid, config.array);

    int failures = 0;
    const auto check = [&failures](double dev, double tol) {
        if (!(dev <= tol)) ++failures;
    };

    {
        cvec ref_field, prod_field;
        const double ref_ms = time_best_ms(20, [&] {
            ref_field = isac::ref::synthesize_field(config.grid, config.array,
                                                    scenario.paths, waveform);
        });
        const double prod_ms = time_best_ms(20, [&] {
            prod_field = isac::synthesize_dr(config.grid, config.array,
                                             scenario.paths, waveform);
            const cvec idr = isac::synthesize_idr(config.grid, config.array,
                                                  scenario.paths, waveform);
            for (std::size_t i = 0; i < prod_field.size(); ++i)
                prod_field[i] += idr[i];
        });
        const double dev = max_rel_dev(ref_field, prod_field);
        report("echo synthesis", ref_ms, prod_ms, dev);
        check(dev, 1e-12);
    }

    isac::RandomStream noise_rng(isac::mix_seed(7, 2, 0));
    const isac::EchoTensor echo =
        isac::synthesize_echo(config.grid, config.array, scenario.paths,
                              waveform, config.noise_var_radar, noise_rng);
    const isac::UEState state{
        {scenario.ue.position.x + 0.5, scenario.ue.position.y - 0.3},
        scenario.ue.speed_mps + 1.0};

    const isac::CoefficientMatrix coeff =
        isac::build_coefficients(state, config.grid, config.array, waveform);
    const isac::CMat dense =
        isac::ref::coefficient_dense(state, config.grid, config.array, waveform);

    {
        isac::EquivalentChannel ref_h, prod_h;
        const double ref_ms = time_best_ms(5, [&] {
            ref_h = isac::ref::estimate_channel_dense(dense, echo.samples);
        });
        const double prod_ms = time_best_ms(50, [&] {
            prod_h = isac::estimate_channel_ls(coeff, echo.samples).channel;
        });
        const double dev = max_rel_dev(isac::ref::stack_channel(ref_h),
                                       isac::ref::stack_channel(prod_h));
        report("channel least squares", ref_ms, prod_ms, dev);
        check(dev, 1e-8);
    }

    {
        const isac::EquivalentChannel h =
            isac::estimate_channel_ls(coeff, echo.samples).channel;
        const cvec stacked = isac::ref::stack_channel(h);
        cvec ref_model, prod_model;
        const double ref_ms = time_best_ms(50, [&] {
            ref_model = isac::matvec(dense, stacked);
        });
        const double prod_ms = time_best_ms(200, [&] {
            prod_model = coeff.apply(h);
        });
        const double dev = max_rel_dev(ref_model, prod_model);
        report("model apply", ref_ms, prod_ms, dev);
        check(dev, 1e-12);
    }

    if (failures > 0) {
        std::fprintf(stderr, "%d kernel(s) disagree beyond tolerance\n",
                     failures);
        return 1;
    }
    return 0;
}
