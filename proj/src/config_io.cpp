// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "isac/config_io.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

namespace isac {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

double parse_double(std::size_t line, const std::string& key,
                    const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        fail(line, "value '" + value + "' for key '" + key + "' is not a number");
    return v;
}

std::uint64_t parse_uint(std::size_t line, const std::string& key,
                         const std::string& value) {
    if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
        fail(line, "value '" + value + "' for key '" + key +
                       "' is not a non-negative integer");
    return std::stoull(value);
}

}  // namespace

HarnessConfig parse_config_text(const std::string& text) {
    HarnessConfig config;
    std::istringstream stream(text);
    std::string raw;
    std::string section;
    std::size_t line_no = 0;

    // Paired keys collected across lines; combined after the parse loop.
    std::optional<double> fixed_x, fixed_y;
    std::optional<double> init_x, init_y, init_v;

    while (std::getline(stream, raw)) {
        ++line_no;
        const auto comment = raw.find_first_of("#;");
        if (comment != std::string::npos) raw.erase(comment);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                fail(line_no, "unterminated section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "scenario" && section != "estimator" &&
                section != "qos" && section != "harness")
                fail(line_no, "unknown section '" + section + "'");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(line_no, "expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, "empty key");
        if (value.empty()) fail(line_no, "empty value for key '" + key + "'");
        if (section.empty())
            fail(line_no, "key '" + key + "' appears before any section");

        const auto num = [&] { return parse_double(line_no, key, value); };
        const auto idx = [&] { return parse_uint(line_no, key, value); };

        if (section == "scenario") {
            ScenarioConfig& sc = config.scenario;
            if (key == "n_subcarriers")
                sc.grid.n_total = idx();
            else if (key == "n_coherent")
                sc.grid.n_coherent = idx();
            else if (key == "n_symbols")
                sc.grid.n_symbols = idx();
            else if (key == "sample_interval_s")
                sc.grid.sample_interval_s = num();
            else if (key == "carrier_freq_hz")
                sc.array.carrier_freq_hz = num();
            else if (key == "n_tx")
                sc.array.n_tx = idx();
            else if (key == "n_rx")
                sc.array.n_rx = idx();
            else if (key == "element_spacing_m")
                sc.array.element_spacing_m = num();
            else if (key == "bs_x")
                sc.array.bs_position.x = num();
            else if (key == "bs_y")
                sc.array.bs_position.y = num();
            else if (key == "radius_m")
                sc.radius_m = num();
            else if (key == "min_distance_m")
                sc.min_distance_m = num();
            else if (key == "speed_min_mps")
                sc.speed_min_mps = num();
            else if (key == "speed_max_mps")
                sc.speed_max_mps = num();
            else if (key == "aoa_min_rad")
                sc.aoa_min_rad = num();
            else if (key == "aoa_max_rad")
                sc.aoa_max_rad = num();
            else if (key == "n_indirect")
                sc.n_indirect = idx();
            else if (key == "echo_gain")
                sc.echo_gain = num();
            else if (key == "loss_exponent")
                sc.loss_exponent = num();
            else if (key == "ref_distance_m")
                sc.ref_distance_m = num();
            else if (key == "shadowing_var_db")
                sc.shadowing_var_db = num();
            else if (key == "noise_var_radar")
                sc.noise_var_radar = num();
            else if (key == "noise_var_comm")
                sc.noise_var_comm = num();
            else if (key == "fixed_x")
                fixed_x = num();
            else if (key == "fixed_y")
                fixed_y = num();
            else if (key == "fixed_speed_mps")
                sc.fixed_speed_mps = num();
            else if (key == "fixed_aoa_rad")
                sc.fixed_aoa_rad = num();
            else
                fail(line_no, "unknown key '" + key + "' in [scenario]");
        } else if (section == "estimator") {
            EstimatorConfig& est = config.estimator;
            if (key == "max_iterations")
                est.max_iterations = idx();
            else if (key == "step_tolerance")
                est.step_tolerance = num();
            else if (key == "grid_points")
                est.grid_init.points_per_axis = idx();
            else if (key == "refine_points")
                est.grid_init.refine_points = idx();
            else if (key == "cond_limit")
                est.cond_limit = num();
            else if (key == "ridge_scale")
                est.ridge_scale = num();
            else if (key == "max_backtracks")
                est.max_backtracks = idx();
            else if (key == "init_x")
                init_x = num();
            else if (key == "init_y")
                init_y = num();
            else if (key == "init_speed_mps")
                init_v = num();
            else
                fail(line_no, "unknown key '" + key + "' in [estimator]");
        } else if (section == "qos") {
            if (key == "rate_floor")
                config.qos.rate_floor = num();
            else if (key == "mi_floor")
                config.qos.mi_floor = num();
            else if (key == "power_cap")
                config.qos.power_cap = num();
            else if (key == "eta_min")
                config.eta_range.min = num();
            else if (key == "eta_max")
                config.eta_range.max = num();
            else if (key == "eta_step")
                config.eta_range.step = num();
            else
                fail(line_no, "unknown key '" + key + "' in [qos]");
        } else {  // harness
            if (key == "seed")
                config.master_seed = idx();
            else if (key == "trials")
                config.n_trials = idx();
            else
                fail(line_no, "unknown key '" + key + "' in [harness]");
        }
    }

    if (fixed_x.has_value() != fixed_y.has_value())
        throw ConfigError("config: fixed_x and fixed_y must appear together");
    if (fixed_x) config.scenario.fixed_ue = Vec2{*fixed_x, *fixed_y};
    if (init_x || init_y || init_v) {
        if (!(init_x && init_y && init_v))
            throw ConfigError(
                "config: init_x, init_y, and init_speed_mps must appear together");
        config.estimator.init = UEState{Vec2{*init_x, *init_y}, *init_v};
    }

    config.scenario.grid.rebuild();
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return config;
}

HarnessConfig load_config(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file)
        throw ConfigError("config: cannot read " + path.string());
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_config_text(buffer.str());
}

}  // namespace isac
