// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "isac/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "isac/geometry.hpp"
#include "isac/waveform.hpp"

namespace isac {

namespace {

constexpr double kRadToDeg = 180.0 / kPi;
constexpr double kPowerTieTol = 1e-9;

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

std::uint64_t stream_seed(std::uint64_t master, StreamPurpose purpose,
                          std::size_t trial) {
    return mix_seed(master, static_cast<std::uint64_t>(purpose),
                    static_cast<std::uint64_t>(trial));
}

Vec2 mirror_across_array(Vec2 p, const ArrayConfig& array) {
    return {p.x, 2.0 * array.bs_position.y - p.y};
}

double folded_position_error(Vec2 estimate, Vec2 truth,
                             const ArrayConfig& array) {
    const double direct = norm(estimate - truth);
    const double mirrored = norm(mirror_across_array(estimate, array) - truth);
    return std::min(direct, mirrored);
}

}  // namespace

SinrProfile build_sinr_profile(const Scenario& scenario,
                               const EstimateTrace& trace,
                               const ScenarioConfig& config) {
    const ArrayConfig& array = config.array;
    const SubcarrierGrid& grid = config.grid;
    const double beam_gain =
        static_cast<double>(array.n_tx) / static_cast<double>(grid.n_symbols);
    const double n_tx = static_cast<double>(array.n_tx);
    const double n_rx = static_cast<double>(array.n_rx);

    // Direct-path quantities come from the sensing outcome; the allocator only
    // sees what the location stage inferred.
    const cplx direct_gain = trace.channel.direct;
    const Vec2 est_pos = trace.final_state.position;
    const double est_dist =
        std::max(norm(est_pos - array.bs_position), config.ref_distance_m);
    const double est_delay = 2.0 * est_dist / kSpeedOfLight;
    const double est_aoa = extract_aoa(est_pos, array);
    const double est_doppler =
        doppler_shift(trace.final_state.speed_mps, array.carrier_freq_hz);
    const double est_loss_db =
        path_loss_db(est_dist, config.ref_distance_m, array.carrier_freq_hz,
                     config.loss_exponent, scenario.comm.shadowing_db);
    const double est_large_scale = std::pow(10.0, -est_loss_db / 10.0);

    SinrProfile profile;
    profile.com.resize(grid.n_total);
    profile.rad.resize(grid.n_total);
    for (std::size_t n = 1; n <= grid.n_total; ++n) {
        const double f = grid.freq(n);
        // Coherent per-subcarrier clutter response across the receive array.
        cvec clutter(array.n_rx, cplx{0.0, 0.0});
        for (std::size_t k = 1; k < scenario.paths.paths.size(); ++k) {
            const PropagationPath& p = scenario.paths.paths[k];
            const cplx rot =
                p.gain *
                std::polar(1.0, -2.0 * kPi * (f - est_doppler) * p.delay_s);
            const cvec b = steering_rx_at(array, f, p.aoa_rad);
            for (std::size_t r = 0; r < array.n_rx; ++r) clutter[r] += rot * b[r];
        }
        double clutter_power = 0.0;
        for (const cplx& c : clutter) clutter_power += std::norm(c);

        cvec total = clutter;
        {
            const cplx rot =
                direct_gain *
                std::polar(1.0, -2.0 * kPi * (f - est_doppler) * est_delay);
            const cvec b = steering_rx_at(array, f, est_aoa);
            for (std::size_t r = 0; r < array.n_rx; ++r) total[r] += rot * b[r];
        }
        double total_power = 0.0;
        for (const cplx& c : total) total_power += std::norm(c);

        // The radar receiver combines with a unit-norm beam steered at the
        // estimated direct angle, so the interfering returns are seen through
        // the beampattern instead of at full array power.
        const cvec beam = steering_rx_at(array, f, est_aoa);
        cplx beamed{0.0, 0.0};
        for (std::size_t r = 0; r < array.n_rx; ++r)
            beamed += std::conj(beam[r]) * clutter[r];
        const double clutter_beamed = std::norm(beamed) / n_rx;

        profile.rad[n - 1] =
            std::norm(direct_gain) * n_rx * n_tx * beam_gain /
            (clutter_beamed * n_tx * beam_gain + config.noise_var_radar);
        profile.com[n - 1] =
            est_large_scale * n_tx * beam_gain /
            (config.noise_var_comm + total_power * n_tx * beam_gain);
    }
    profile.validate();
    return profile;
}

TrialResult run_trial(const HarnessConfig& config, std::size_t trial_index) {
    config.validate();
    const ScenarioConfig& sc = config.scenario;

    TrialResult out;
    out.scenario_seed =
        stream_seed(config.master_seed, StreamPurpose::scenario, trial_index);
    out.pos_error_m = quiet_nan();
    out.aoa_error_deg = quiet_nan();
    out.residual = quiet_nan();

    RandomStream scenario_rng(out.scenario_seed);
    Scenario scenario;
    try {
        scenario = sample_scenario(sc, scenario_rng);
    } catch (const std::runtime_error&) {
        return out;
    }
    out.truth = scenario.ue;
    out.true_aoa_deg = extract_aoa(scenario.ue.position, sc.array) * kRadToDeg;

    const TxWaveform waveform = TxWaveform::phase_alternating(sc.grid, sc.array);
    RandomStream noise_rng(
        stream_seed(config.master_seed, StreamPurpose::noise, trial_index));
    const EchoTensor echo = synthesize_echo(sc.grid, sc.array, scenario.paths,
                                            waveform, sc.noise_var_radar,
                                            noise_rng);

    EstimatorConfig est = config.estimator;
    // The initial search always spans the deployment region.
    est.grid_init.radius_m = sc.radius_m;
    est.grid_init.min_distance_m = sc.min_distance_m;

    EstimateTrace trace;
    try {
        trace = run_sensing(echo.samples, est, sc.grid, sc.array, waveform);
    } catch (const std::runtime_error&) {
        return out;
    }
    if (!trace.valid) return out;

    out.sensing_ok = true;
    out.estimate = trace.final_state;
    out.est_aoa_deg = extract_aoa(trace.final_state.position, sc.array) * kRadToDeg;
    out.pos_error_m =
        folded_position_error(trace.final_state.position, scenario.ue.position,
                              sc.array);
    out.aoa_error_deg = std::abs(out.est_aoa_deg - out.true_aoa_deg);
    out.iterations = trace.iterations_used;
    out.residual = trace.final_residual;
    out.trace = trace.iterations;

    try {
        const SinrProfile profile = build_sinr_profile(scenario, trace, sc);
        out.sweep = sweep_eta(profile, config.eta_range, config.qos);
        out.baseline_eta = out.sweep.any_feasible ? out.sweep.best_eta : 1.0;
        RandomStream baseline_rng(
            stream_seed(config.master_seed, StreamPurpose::baseline, trial_index));
        out.baselines =
            raca_baselines(profile, out.baseline_eta, config.qos, baseline_rng);
    } catch (const std::exception&) {
        // Degenerate profile: leave every allocation marked infeasible.
        out.sweep = {};
        out.baselines = {};
    }
    return out;
}

std::vector<TrialResult> run_montecarlo(const HarnessConfig& config) {
    config.validate();
    std::vector<TrialResult> results(config.n_trials);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t t = 0; t < config.n_trials; ++t)
        results[t] = run_trial(config, t);
    return results;
}

std::vector<std::pair<double, double>> error_cdf(std::vector<double> samples) {
    if (samples.empty())
        throw std::invalid_argument("error_cdf: samples must be non-empty");
    std::sort(samples.begin(), samples.end());
    std::vector<std::pair<double, double>> table;
    table.reserve(samples.size());
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        table.emplace_back(samples[i], static_cast<double>(i + 1) / n);
    return table;
}

AggregateMetrics aggregate_metrics(const std::vector<TrialResult>& results) {
    AggregateMetrics m;
    m.n_trials = results.size();

    std::vector<double> aoas;
    std::vector<double> errors;
    for (const TrialResult& t : results) {
        if (!t.sensing_ok) continue;
        aoas.push_back(t.est_aoa_deg);
        errors.push_back(t.pos_error_m);
    }
    m.n_sensing_ok = aoas.size();
    if (!aoas.empty()) {
        double sum = 0.0;
        for (const double a : aoas) sum += a;
        m.aoa_mean_deg = sum / static_cast<double>(aoas.size());
        if (aoas.size() > 1) {
            double sq = 0.0;
            for (const double a : aoas) {
                const double d = a - m.aoa_mean_deg;
                sq += d * d;
            }
            m.aoa_std_deg = std::sqrt(sq / static_cast<double>(aoas.size() - 1));
        }
        std::sort(errors.begin(), errors.end());
        double esum = 0.0;
        std::size_t within = 0;
        for (const double e : errors) {
            esum += e;
            if (e <= 0.2) ++within;
        }
        m.pos_err_mean_m = esum / static_cast<double>(errors.size());
        const std::size_t h = errors.size() / 2;
        m.pos_err_median_m = (errors.size() % 2 == 1)
                                 ? errors[h]
                                 : 0.5 * (errors[h - 1] + errors[h]);
        m.frac_within_0_2m =
            static_cast<double>(within) / static_cast<double>(errors.size());
    }

    std::size_t cmp1 = 0, cmp2 = 0, cmp3 = 0;
    std::size_t win1 = 0, win2 = 0, win3 = 0;
    double sum_jspa = 0.0, sum1 = 0.0, sum2 = 0.0, sum3 = 0.0;
    for (const TrialResult& t : results) {
        if (!t.sweep.any_feasible) continue;
        ++m.n_feasible_jspa;
        const double jspa = t.sweep.best.total_power;
        const BaselineSet& b = t.baselines;
        if (b.threshold_uniform.feasible) {
            ++cmp1;
            if (jspa <= b.threshold_uniform.total_power + kPowerTieTol) ++win1;
        }
        if (b.random_waterfill.feasible) {
            ++cmp2;
            if (jspa <= b.random_waterfill.total_power + kPowerTieTol) ++win2;
        }
        if (b.random_uniform.feasible) {
            ++cmp3;
            if (jspa <= b.random_uniform.total_power + kPowerTieTol) ++win3;
        }
        if (b.threshold_uniform.feasible && b.random_waterfill.feasible &&
            b.random_uniform.feasible) {
            ++m.n_comparable;
            sum_jspa += jspa;
            sum1 += b.threshold_uniform.total_power;
            sum2 += b.random_waterfill.total_power;
            sum3 += b.random_uniform.total_power;
        }
    }
    if (m.n_comparable > 0) {
        const double n = static_cast<double>(m.n_comparable);
        m.mean_power_jspa = sum_jspa / n;
        m.mean_power_raca1 = sum1 / n;
        m.mean_power_raca2 = sum2 / n;
        m.mean_power_raca3 = sum3 / n;
    }
    if (cmp1 > 0) m.win_frac_raca1 = static_cast<double>(win1) / static_cast<double>(cmp1);
    if (cmp2 > 0) m.win_frac_raca2 = static_cast<double>(win2) / static_cast<double>(cmp2);
    if (cmp3 > 0) m.win_frac_raca3 = static_cast<double>(win3) / static_cast<double>(cmp3);
    return m;
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw std::runtime_error("export_results: cannot open " + path.string());
    return file;
}

using ordered_json = nlohmann::ordered_json;

ordered_json scenario_json(const ScenarioConfig& sc) {
    ordered_json j;
    j["n_subcarriers"] = sc.grid.n_total;
    j["n_coherent"] = sc.grid.n_coherent;
    j["n_symbols"] = sc.grid.n_symbols;
    j["sample_interval_s"] = sc.grid.sample_interval_s;
    j["carrier_freq_hz"] = sc.array.carrier_freq_hz;
    j["n_tx"] = sc.array.n_tx;
    j["n_rx"] = sc.array.n_rx;
    j["element_spacing_m"] = sc.array.spacing_m();
    j["bs_x"] = sc.array.bs_position.x;
    j["bs_y"] = sc.array.bs_position.y;
    j["radius_m"] = sc.radius_m;
    j["min_distance_m"] = sc.min_distance_m;
    j["speed_min_mps"] = sc.speed_min_mps;
    j["speed_max_mps"] = sc.speed_max_mps;
    j["aoa_min_rad"] = sc.aoa_min_rad;
    j["aoa_max_rad"] = sc.aoa_max_rad;
    j["n_indirect"] = sc.n_indirect;
    j["echo_gain"] = sc.echo_gain;
    j["loss_exponent"] = sc.loss_exponent;
    j["ref_distance_m"] = sc.ref_distance_m;
    j["shadowing_var_db"] = sc.shadowing_var_db;
    j["noise_var_radar"] = sc.noise_var_radar;
    j["noise_var_comm"] = sc.noise_var_comm;
    if (sc.fixed_ue)
        j["fixed_ue"] = {sc.fixed_ue->x, sc.fixed_ue->y};
    else
        j["fixed_ue"] = nullptr;
    if (sc.fixed_speed_mps)
        j["fixed_speed_mps"] = *sc.fixed_speed_mps;
    else
        j["fixed_speed_mps"] = nullptr;
    if (sc.fixed_aoa_rad)
        j["fixed_aoa_rad"] = *sc.fixed_aoa_rad;
    else
        j["fixed_aoa_rad"] = nullptr;
    return j;
}

ordered_json estimator_json(const EstimatorConfig& est) {
    ordered_json j;
    j["max_iterations"] = est.max_iterations;
    j["step_tolerance"] = est.step_tolerance;
    j["grid_points"] = est.grid_init.points_per_axis;
    j["refine_points"] = est.grid_init.refine_points;
    j["grid_speeds"] = est.grid_init.speeds;
    j["cond_limit"] = est.cond_limit;
    j["ridge_scale"] = est.ridge_scale;
    j["max_backtracks"] = est.max_backtracks;
    if (est.init)
        j["init"] = {est.init->position.x, est.init->position.y,
                     est.init->speed_mps};
    else
        j["init"] = nullptr;
    return j;
}

}  // namespace

void export_results(const std::filesystem::path& dir, const HarnessConfig& config,
                    const std::vector<TrialResult>& results) {
    std::filesystem::create_directories(dir);

    // Representative trial for the sweep and allocation tables.
    std::size_t rep = results.size();
    for (std::size_t t = 0; t < results.size(); ++t) {
        if (results[t].sensing_ok) {
            rep = t;
            break;
        }
    }

    {
        std::ofstream f = open_output(dir / "trials.csv");
        f << "seed,true_x,true_y,true_v,est_x,est_y,est_v,pos_err_m,"
             "aoa_err_deg,iterations,residual,total_power_jspa,"
             "total_power_raca1,total_power_raca2,total_power_raca3,"
             "feasible_jspa,feasible_raca1,feasible_raca2,feasible_raca3\n";
        for (const TrialResult& t : results) {
            const double jspa_power =
                t.sweep.any_feasible ? t.sweep.best.total_power : 0.0;
            f << std::to_string(t.scenario_seed) << ','
              << format_number(t.truth.position.x) << ','
              << format_number(t.truth.position.y) << ','
              << format_number(t.truth.speed_mps) << ','
              << format_number(t.estimate.position.x) << ','
              << format_number(t.estimate.position.y) << ','
              << format_number(t.estimate.speed_mps) << ','
              << format_number(t.pos_error_m) << ','
              << format_number(t.aoa_error_deg) << ','
              << std::to_string(t.iterations) << ','
              << format_number(t.residual) << ','
              << format_number(jspa_power) << ','
              << format_number(t.baselines.threshold_uniform.total_power) << ','
              << format_number(t.baselines.random_waterfill.total_power) << ','
              << format_number(t.baselines.random_uniform.total_power) << ','
              << (t.sweep.any_feasible ? '1' : '0') << ','
              << (t.baselines.threshold_uniform.feasible ? '1' : '0') << ','
              << (t.baselines.random_waterfill.feasible ? '1' : '0') << ','
              << (t.baselines.random_uniform.feasible ? '1' : '0') << '\n';
        }
    }

    {
        std::ofstream f = open_output(dir / "cdf.csv");
        f << "error_m,cdf\n";
        std::vector<double> errors;
        for (const TrialResult& t : results)
            if (t.sensing_ok) errors.push_back(t.pos_error_m);
        if (!errors.empty()) {
            for (const auto& [e, c] : error_cdf(std::move(errors)))
                f << format_number(e) << ',' << format_number(c) << '\n';
        }
    }

    {
        std::ofstream f = open_output(dir / "sweep.csv");
        f << "eta,n_com,n_rad,power_com_w,power_rad_w,power_total_w,feasible\n";
        if (rep < results.size()) {
            for (const SweepPoint& p : results[rep].sweep.points) {
                f << format_number(p.eta) << ',' << std::to_string(p.n_com)
                  << ',' << std::to_string(p.n_rad) << ','
                  << format_number(p.power_com) << ','
                  << format_number(p.power_rad) << ','
                  << format_number(p.power_total) << ','
                  << (p.feasible ? '1' : '0') << '\n';
            }
        }
    }

    {
        std::ofstream f = open_output(dir / "allocation.csv");
        f << "subcarrier_index,assigned_service,power_w\n";
        if (rep < results.size() && results[rep].sweep.any_feasible) {
            const JointAllocation& best = results[rep].sweep.best;
            for (std::size_t i = 0; i < best.power.size(); ++i) {
                f << std::to_string(i + 1) << ','
                  << (best.partition.to_com[i] != 0 ? "com" : "rad") << ','
                  << format_number(best.power[i]) << '\n';
            }
        }
    }

    {
        const AggregateMetrics m = aggregate_metrics(results);
        ordered_json j;
        j["seed"] = config.master_seed;
        j["trials"] = config.n_trials;
        j["config"]["scenario"] = scenario_json(config.scenario);
        j["config"]["estimator"] = estimator_json(config.estimator);
        j["config"]["qos"] = {{"rate_floor", config.qos.rate_floor},
                              {"mi_floor", config.qos.mi_floor},
                              {"power_cap", config.qos.power_cap}};
        j["config"]["eta_range"] = {{"min", config.eta_range.min},
                                    {"max", config.eta_range.max},
                                    {"step", config.eta_range.step}};
        j["sensing"]["n_ok"] = m.n_sensing_ok;
        j["sensing"]["n_failed"] = m.n_trials - m.n_sensing_ok;
        j["sensing"]["aoa_mean_deg"] = m.aoa_mean_deg;
        j["sensing"]["aoa_std_deg"] = m.aoa_std_deg;
        j["sensing"]["pos_err_mean_m"] = m.pos_err_mean_m;
        j["sensing"]["pos_err_median_m"] = m.pos_err_median_m;
        j["sensing"]["frac_within_0_2m"] = m.frac_within_0_2m;
        j["allocation"]["n_feasible_jspa"] = m.n_feasible_jspa;
        j["allocation"]["n_comparable"] = m.n_comparable;
        if (rep < results.size() && results[rep].sweep.any_feasible)
            j["allocation"]["best_eta"] = results[rep].sweep.best_eta;
        else
            j["allocation"]["best_eta"] = nullptr;
        j["allocation"]["mean_power_jspa"] = m.mean_power_jspa;
        j["allocation"]["mean_power_raca1"] = m.mean_power_raca1;
        j["allocation"]["mean_power_raca2"] = m.mean_power_raca2;
        j["allocation"]["mean_power_raca3"] = m.mean_power_raca3;
        j["allocation"]["win_frac_raca1"] = m.win_frac_raca1;
        j["allocation"]["win_frac_raca2"] = m.win_frac_raca2;
        j["allocation"]["win_frac_raca3"] = m.win_frac_raca3;
        std::ofstream f = open_output(dir / "summary.json");
        f << j.dump(2) << '\n';
    }
}

}  // namespace isac
