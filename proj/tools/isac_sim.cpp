// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

/**
 * @file isac_sim.cpp
 * @brief Command-line front end: configuration ingestion, subcommand dispatch,
 *        and result persistence.
 *
 * Exit codes are a stable contract: 0 success, 1 configuration error,
 * 2 estimation failure, 3 allocation infeasibility. Progress goes to stderr;
 * data goes to files under the output directory.
 */

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"

#include "isac/config_io.hpp"
#include "isac/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitEstimation = 2;
constexpr int kExitInfeasible = 3;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    std::size_t jobs = 0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Configuration file (INI)");
    cmd->add_option("--out", opts.out_dir, "Output directory")
        ->capture_default_str();
    cmd->add_option("--seed", opts.seed, "Master seed")->capture_default_str();
    cmd->add_option("--jobs", opts.jobs,
                    "Worker thread count (0 keeps the library default)");
}

void apply_jobs(std::size_t jobs) {
#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(static_cast<int>(jobs));
#else
    (void)jobs;
#endif
}

isac::HarnessConfig make_config(const CLI::App* cmd, const CommonOpts& opts) {
    isac::HarnessConfig config = opts.config_path.empty()
                                     ? isac::HarnessConfig{}
                                     : isac::load_config(opts.config_path);
    if (cmd->count("--seed") > 0) config.master_seed = opts.seed;
    return config;
}

double parse_number(const std::string& text, const std::string& flag) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw isac::ConfigError(flag + ": '" + text + "' is not a number");
    return v;
}

isac::Vec2 parse_ue(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos || comma + 1 >= text.size())
        throw isac::ConfigError("--ue expects 'X,Y'");
    return {parse_number(text.substr(0, comma), "--ue"),
            parse_number(text.substr(comma + 1), "--ue")};
}

isac::EtaRange parse_eta_range(const std::string& text) {
    const auto first = text.find(':');
    const auto second = text.find(':', first == std::string::npos ? 0 : first + 1);
    if (first == std::string::npos || second == std::string::npos ||
        second + 1 >= text.size())
        throw isac::ConfigError("--eta-range expects 'MIN:MAX:STEP'");
    isac::EtaRange range;
    range.min = parse_number(text.substr(0, first), "--eta-range");
    range.max = parse_number(text.substr(first + 1, second - first - 1),
                             "--eta-range");
    range.step = parse_number(text.substr(second + 1), "--eta-range");
    return range;
}

void write_trace(const std::filesystem::path& dir,
                 const isac::TrialResult& result) {
    std::filesystem::create_directories(dir);
    const auto path = dir / "trace.csv";
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + path.string());
    f << "iteration,x,y,v_mps,residual,step_norm\n";
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        const isac::IterationRecord& rec = result.trace[i];
        f << std::to_string(i) << ','
          << isac::format_number(rec.state.position.x) << ','
          << isac::format_number(rec.state.position.y) << ','
          << isac::format_number(rec.state.speed_mps) << ','
          << isac::format_number(rec.residual_norm) << ','
          << isac::format_number(rec.step_norm) << '\n';
    }
}

int run_sense(const CLI::App* cmd, const CommonOpts& opts,
              const std::string& ue_text, double velocity) {
    isac::HarnessConfig config = make_config(cmd, opts);
    if (!ue_text.empty()) config.scenario.fixed_ue = parse_ue(ue_text);
    if (cmd->count("--velocity") > 0) config.scenario.fixed_speed_mps = velocity;
    config.n_trials = 1;
    apply_jobs(opts.jobs);

    std::fprintf(stderr, "sense: seed %s\n",
                 std::to_string(config.master_seed).c_str());
    const isac::TrialResult result = isac::run_trial(config, 0);
    const std::filesystem::path dir(opts.out_dir);
    isac::export_results(dir, config, {result});
    write_trace(dir, result);

    if (!result.sensing_ok) {
        std::fprintf(stderr, "error: estimation stage failed to produce a "
                             "finite estimate\n");
        return kExitEstimation;
    }
    std::fprintf(stderr,
                 "estimate: x=%s m, y=%s m, v=%s m/s; position error %s m "
                 "(%s iterations)\n",
                 isac::format_number(result.estimate.position.x).c_str(),
                 isac::format_number(result.estimate.position.y).c_str(),
                 isac::format_number(result.estimate.speed_mps).c_str(),
                 isac::format_number(result.pos_error_m).c_str(),
                 std::to_string(result.iterations).c_str());
    return kExitOk;
}

int run_allocate(const CLI::App* cmd, const CommonOpts& opts,
                 const std::string& eta_text) {
    isac::HarnessConfig config = make_config(cmd, opts);
    if (!eta_text.empty()) config.eta_range = parse_eta_range(eta_text);
    config.n_trials = 1;
    apply_jobs(opts.jobs);

    std::fprintf(stderr, "allocate: seed %s\n",
                 std::to_string(config.master_seed).c_str());
    const isac::TrialResult result = isac::run_trial(config, 0);
    isac::export_results(opts.out_dir, config, {result});

    if (!result.sensing_ok) {
        std::fprintf(stderr, "error: estimation stage failed; no profile to "
                             "allocate\n");
        return kExitEstimation;
    }
    if (!result.sweep.any_feasible) {
        // Report the closest miss across the grid.
        const isac::SweepPoint* closest = nullptr;
        for (const isac::SweepPoint& p : result.sweep.points)
            if (closest == nullptr || p.max_achievable > closest->max_achievable)
                closest = &p;
        if (closest != nullptr)
            std::fprintf(
                stderr,
                "error: no feasible allocation on the threshold grid; closest "
                "at eta=%s, limiting service '%s', max achievable %s\n",
                isac::format_number(closest->eta).c_str(),
                closest->limiting_service.c_str(),
                isac::format_number(closest->max_achievable).c_str());
        else
            std::fprintf(stderr, "error: empty threshold grid\n");
        return kExitInfeasible;
    }
    std::fprintf(stderr, "best threshold %s: total power %s W (%s downlink / %s "
                         "sensing carriers)\n",
                 isac::format_number(result.sweep.best_eta).c_str(),
                 isac::format_number(result.sweep.best.total_power).c_str(),
                 std::to_string(result.sweep.best.partition.n_com).c_str(),
                 std::to_string(result.sweep.best.partition.n_rad).c_str());
    return kExitOk;
}

int run_montecarlo_cmd(const CLI::App* cmd, const CommonOpts& opts,
                       std::size_t trials, const std::string& eta_text) {
    isac::HarnessConfig config = make_config(cmd, opts);
    if (cmd->count("--trials") > 0) config.n_trials = trials;
    if (!eta_text.empty()) config.eta_range = parse_eta_range(eta_text);
    apply_jobs(opts.jobs);

    std::fprintf(stderr, "montecarlo: %s trials, seed %s\n",
                 std::to_string(config.n_trials).c_str(),
                 std::to_string(config.master_seed).c_str());
    const std::vector<isac::TrialResult> results = isac::run_montecarlo(config);
    isac::export_results(opts.out_dir, config, results);

    const isac::AggregateMetrics m = isac::aggregate_metrics(results);
    std::fprintf(stderr,
                 "done: %s/%s trials ok, AoA mean %s deg (std %s), %s%% of "
                 "errors within 0.2 m, %s feasible allocations\n",
                 std::to_string(m.n_sensing_ok).c_str(),
                 std::to_string(m.n_trials).c_str(),
                 isac::format_number(m.aoa_mean_deg).c_str(),
                 isac::format_number(m.aoa_std_deg).c_str(),
                 isac::format_number(100.0 * m.frac_within_0_2m).c_str(),
                 std::to_string(m.n_feasible_jspa).c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint radar sensing and communication simulator"};
    app.require_subcommand(1);

    CommonOpts sense_opts, alloc_opts, mc_opts;
    std::string ue_text, alloc_eta_text, mc_eta_text;
    double velocity = 0.0;
    std::size_t trials = 100;

    CLI::App* sense = app.add_subcommand("sense", "Run one location-sensing trial");
    add_common(sense, sense_opts);
    sense->add_option("--ue", ue_text, "Pin the mobile position as 'X,Y' [m]");
    sense->add_option("--velocity", velocity, "Pin the mobile speed [m/s]");

    CLI::App* allocate = app.add_subcommand(
        "allocate", "Sense once, then sweep the allocation threshold");
    add_common(allocate, alloc_opts);
    allocate->add_option("--eta-range", alloc_eta_text,
                         "Threshold grid as 'MIN:MAX:STEP'");

    CLI::App* mc = app.add_subcommand("montecarlo",
                                      "Run the full Monte Carlo pipeline");
    add_common(mc, mc_opts);
    mc->add_option("--trials", trials, "Trial count")->capture_default_str();
    mc->add_option("--eta-range", mc_eta_text, "Threshold grid as 'MIN:MAX:STEP'");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (sense->parsed()) return run_sense(sense, sense_opts, ue_text, velocity);
        if (allocate->parsed())
            return run_allocate(allocate, alloc_opts, alloc_eta_text);
        return run_montecarlo_cmd(mc, mc_opts, trials, mc_eta_text);
    } catch (const isac::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
}
