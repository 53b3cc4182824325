// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

/**
 * @file test_harness.cpp
 * @brief Trial pipeline, aggregation, CDF, and export determinism.
 */
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "isac/harness.hpp"
#include "isac/rng.hpp"
#include "isac/scenario.hpp"

using namespace isac;

namespace {

HarnessConfig calibrated_config() {
    HarnessConfig config;
    config.scenario.echo_gain = 1.0e-3;
    config.master_seed = 11;
    config.n_trials = 4;
    return config;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_CASE("trials are deterministic in the trial index", "[harness]") {
    const HarnessConfig config = calibrated_config();
    const TrialResult a = run_trial(config, 2);
    const TrialResult b = run_trial(config, 2);
    CHECK(a.scenario_seed == b.scenario_seed);
    CHECK(a.truth.position.x == b.truth.position.x);
    CHECK(a.estimate.position.x == b.estimate.position.x);
    CHECK(a.residual == b.residual);
    CHECK(a.sweep.any_feasible == b.sweep.any_feasible);
    CHECK(a.baselines.random_waterfill.total_power ==
          b.baselines.random_waterfill.total_power);

    const TrialResult c = run_trial(config, 3);
    CHECK(c.scenario_seed != a.scenario_seed);
}

TEST_CASE("campaign fills trial-indexed slots in order", "[harness]") {
    const HarnessConfig config = calibrated_config();
    const std::vector<TrialResult> all = run_montecarlo(config);
    REQUIRE(all.size() == config.n_trials);
    for (std::size_t i = 0; i < all.size(); ++i) {
        const TrialResult solo = run_trial(config, i);
        CHECK(all[i].scenario_seed == solo.scenario_seed);
        CHECK(all[i].pos_error_m == solo.pos_error_m);
        CHECK(all[i].sweep.any_feasible == solo.sweep.any_feasible);
    }
}

TEST_CASE("sinr profile is positive, finite, and estimate-driven", "[harness]") {
    const HarnessConfig config = calibrated_config();
    const TrialResult t = run_trial(config, 0);
    REQUIRE(t.sensing_ok);

    RandomStream rng(mix_seed(config.master_seed,
                              static_cast<std::uint64_t>(StreamPurpose::scenario),
                              0));
    const Scenario scen = sample_scenario(config.scenario, rng);

    // Rebuild the trace through the public pipeline to feed the profile.
    EstimateTrace trace;
    trace.final_state = t.estimate;
    trace.channel.direct = cplx{1.0e-7, 0.0};
    trace.channel.indirect.assign(
        config.scenario.grid.n_coherent * config.scenario.array.n_rx,
        cplx{0.0, 0.0});
    trace.valid = true;

    const SinrProfile profile =
        build_sinr_profile(scen, trace, config.scenario);
    REQUIRE(profile.com.size() == config.scenario.grid.n_total);
    REQUIRE(profile.rad.size() == config.scenario.grid.n_total);
    for (std::size_t i = 0; i < profile.com.size(); ++i) {
        CHECK(std::isfinite(profile.com[i]));
        CHECK(std::isfinite(profile.rad[i]));
        CHECK(profile.com[i] > 0.0);
        CHECK(profile.rad[i] > 0.0);
    }
}

TEST_CASE("error cdf is a sorted empirical distribution", "[harness]") {
    const auto cdf = error_cdf({0.4, 0.1, 0.3, 0.2});
    REQUIRE(cdf.size() == 4);
    // Sorted values with fractions k/n.
    CHECK(cdf[0].first == Catch::Approx(0.1));
    CHECK(cdf[0].second == Catch::Approx(0.25));
    CHECK(cdf[1].first == Catch::Approx(0.2));
    CHECK(cdf[1].second == Catch::Approx(0.5));
    CHECK(cdf[3].first == Catch::Approx(0.4));
    CHECK(cdf[3].second == Catch::Approx(1.0));
    for (std::size_t i = 1; i < cdf.size(); ++i) {
        CHECK(cdf[i].first >= cdf[i - 1].first);
        CHECK(cdf[i].second > cdf[i - 1].second);
    }
}

TEST_CASE("aggregation summarizes hand-built trials", "[harness]") {
    std::vector<TrialResult> results(2);
    results[0].sensing_ok = true;
    results[0].aoa_error_deg = 1.0;
    results[0].est_aoa_deg = 19.0;
    results[0].pos_error_m = 0.1;
    results[1].sensing_ok = true;
    results[1].aoa_error_deg = -1.0;
    results[1].est_aoa_deg = 21.0;
    results[1].pos_error_m = 0.3;
    results[0].sweep.any_feasible = true;
    results[0].sweep.best.total_power = 10.0;
    results[0].baselines.threshold_uniform = {true, 12.0};
    results[0].baselines.random_waterfill = {true, 11.0};
    results[0].baselines.random_uniform = {true, 15.0};
    results[1].sweep.any_feasible = false;

    const AggregateMetrics m = aggregate_metrics(results);
    CHECK(m.n_trials == 2);
    CHECK(m.n_sensing_ok == 2);
    CHECK(m.aoa_mean_deg == Catch::Approx(20.0));
    CHECK(m.pos_err_mean_m == Catch::Approx(0.2));
    CHECK(m.pos_err_median_m == Catch::Approx(0.2));
    CHECK(m.frac_within_0_2m == Catch::Approx(0.5));
    CHECK(m.n_feasible_jspa == 1);
    CHECK(m.n_comparable == 1);
    CHECK(m.mean_power_jspa == Catch::Approx(10.0));
    CHECK(m.mean_power_raca2 == Catch::Approx(11.0));
    CHECK(m.win_frac_raca1 == Catch::Approx(1.0));
    CHECK(m.win_frac_raca3 == Catch::Approx(1.0));
}

TEST_CASE("number formatting round-trips cleanly", "[harness]") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(50.0) == "50");
    CHECK(format_number(1e-14) == "1e-14");
}

TEST_CASE("export writes the full deterministic file set", "[harness]") {
    const HarnessConfig config = calibrated_config();
    const std::vector<TrialResult> results = run_montecarlo(config);

    const auto dir1 = std::filesystem::temp_directory_path() / "isac_export_a";
    const auto dir2 = std::filesystem::temp_directory_path() / "isac_export_b";
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
    export_results(dir1, config, results);
    export_results(dir2, config, results);

    for (const char* name :
         {"trials.csv", "cdf.csv", "sweep.csv", "allocation.csv",
          "summary.json"}) {
        CAPTURE(name);
        REQUIRE(std::filesystem::exists(dir1 / name));
        const std::string a = read_file(dir1 / name);
        const std::string b = read_file(dir2 / name);
        CHECK(a == b);
        CHECK_FALSE(a.empty());
    }
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}
