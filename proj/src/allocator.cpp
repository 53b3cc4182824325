// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

#include "isac/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace isac {

namespace {

constexpr double kFloorTolerance = 1e-9;
constexpr std::size_t kMaxBisection = 200;

double rate_term(double power, double sinr) {
    return std::log2(1.0 + power * sinr);
}

}  // namespace

std::vector<double> EtaRange::values() const {
    validate();
    std::vector<double> vals;
    // Index-based stepping avoids accumulation drift; the endpoint is kept
    // when it lands within half a step.
    const std::size_t count =
        static_cast<std::size_t>(std::floor((max - min) / step + 0.5)) + 1;
    vals.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double v = min + step * static_cast<double>(i);
        if (v <= max + 0.5 * step) vals.push_back(v);
    }
    return vals;
}

SubcarrierPartition partition_subcarriers(const SinrProfile& profile, double eta) {
    profile.validate();
    if (!(eta >= 0.0))
        throw std::invalid_argument("partition_subcarriers: eta must be >= 0");
    SubcarrierPartition part;
    part.to_com.resize(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const bool com = profile.com[i] >= eta * profile.rad[i];
        part.to_com[i] = com ? 1 : 0;
        if (com)
            ++part.n_com;
        else
            ++part.n_rad;
    }
    return part;
}

double comm_rate(const SubcarrierPartition& partition,
                 std::span<const double> power, const SinrProfile& profile) {
    if (partition.to_com.size() != profile.size() ||
        power.size() != profile.size())
        throw std::invalid_argument("comm_rate: dimension mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i)
        if (partition.to_com[i] != 0) sum += rate_term(power[i], profile.com[i]);
    return sum;
}

double sensing_mi(const SubcarrierPartition& partition,
                  std::span<const double> power, const SinrProfile& profile) {
    if (partition.to_com.size() != profile.size() ||
        power.size() != profile.size())
        throw std::invalid_argument("sensing_mi: dimension mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i)
        if (partition.to_com[i] == 0) sum += rate_term(power[i], profile.rad[i]);
    return sum;
}

Waterfill waterfill(std::span<const double> sinrs, double floor, double cap) {
    if (!(cap > 0.0))
        throw std::invalid_argument("waterfill: cap must be > 0");
    if (floor < 0.0)
        throw std::invalid_argument("waterfill: floor must be >= 0");
    for (const double s : sinrs)
        if (!(s > 0.0))
            throw std::invalid_argument("waterfill: SINRs must be > 0");

    Waterfill wf;
    wf.power.assign(sinrs.size(), 0.0);

    double max_value = 0.0;
    for (const double s : sinrs) max_value += rate_term(cap, s);
    wf.max_achievable = max_value;

    if (floor == 0.0) {
        wf.feasible = true;
        wf.achieved = 0.0;
        if (!sinrs.empty()) {
            double inv_min = std::numeric_limits<double>::infinity();
            for (const double s : sinrs) inv_min = std::min(inv_min, 1.0 / s);
            wf.water_level = inv_min;
        }
        return wf;
    }
    if (sinrs.empty() || max_value + kFloorTolerance < floor) {
        wf.feasible = false;
        wf.achieved = 0.0;
        return wf;
    }

    std::vector<double> inv(sinrs.size());
    for (std::size_t i = 0; i < sinrs.size(); ++i) inv[i] = 1.0 / sinrs[i];
    const auto [lo_it, hi_it] = std::minmax_element(inv.begin(), inv.end());

    const auto fill = [&](double level, std::vector<double>& p) {
        double achieved = 0.0;
        for (std::size_t i = 0; i < inv.size(); ++i) {
            p[i] = std::clamp(level - inv[i], 0.0, cap);
            achieved += rate_term(p[i], sinrs[i]);
        }
        return achieved;
    };

    double lo = *lo_it;           // achieved == 0 here
    double hi = *hi_it + cap;     // achieved == max_value here
    std::vector<double> powers(inv.size(), 0.0);
    double level = hi;
    double achieved = fill(level, powers);
    for (std::size_t it = 0; it < kMaxBisection; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double a = fill(mid, powers);
        if (std::abs(a - floor) <= kFloorTolerance) {
            level = mid;
            achieved = a;
            break;
        }
        if (a < floor)
            lo = mid;
        else {
            hi = mid;
            level = mid;
            achieved = a;
        }
    }
    // Fall back to the feasible bracket end when the tolerance was not hit.
    if (achieved + kFloorTolerance < floor) {
        level = hi;
        achieved = fill(level, powers);
    } else {
        achieved = fill(level, powers);
    }

    wf.feasible = true;
    wf.power = powers;
    wf.water_level = level;
    wf.achieved = achieved;
    for (const double p : powers) {
        wf.total += p;
        if (p >= cap) wf.capped = true;
    }
    return wf;
}

namespace {

// Smallest uniform per-carrier power meeting the floor, bisected, capped.
Waterfill uniform_power(std::span<const double> sinrs, double floor, double cap) {
    Waterfill wf;
    wf.power.assign(sinrs.size(), 0.0);
    double max_value = 0.0;
    for (const double s : sinrs) max_value += rate_term(cap, s);
    wf.max_achievable = max_value;
    if (floor == 0.0) {
        wf.feasible = true;
        return wf;
    }
    if (sinrs.empty() || max_value + kFloorTolerance < floor) return wf;

    const auto value_at = [&](double p) {
        double sum = 0.0;
        for (const double s : sinrs) sum += rate_term(p, s);
        return sum;
    };
    double lo = 0.0, hi = cap;
    for (std::size_t it = 0; it < kMaxBisection; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (value_at(mid) < floor)
            lo = mid;
        else
            hi = mid;
        if (std::abs(value_at(hi) - floor) <= kFloorTolerance) break;
    }
    wf.feasible = true;
    std::fill(wf.power.begin(), wf.power.end(), hi);
    wf.achieved = value_at(hi);
    wf.total = hi * static_cast<double>(sinrs.size());
    wf.capped = hi >= cap;
    wf.water_level = hi;
    return wf;
}

struct ServiceSplit {
    std::vector<double> sinr_com, sinr_rad;
    std::vector<std::size_t> idx_com, idx_rad;
};

ServiceSplit split_by_partition(const SinrProfile& profile,
                                const SubcarrierPartition& part) {
    ServiceSplit s;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (part.to_com[i] != 0) {
            s.sinr_com.push_back(profile.com[i]);
            s.idx_com.push_back(i);
        } else {
            s.sinr_rad.push_back(profile.rad[i]);
            s.idx_rad.push_back(i);
        }
    }
    return s;
}

JointAllocation compose_allocation(const SinrProfile& profile,
                                   const SubcarrierPartition& part,
                                   const Waterfill& com, const Waterfill& rad,
                                   const ServiceSplit& split) {
    JointAllocation out;
    out.partition = part;
    out.power.assign(profile.size(), 0.0);
    if (!com.feasible) {
        out.limiting_service = "com";
        out.max_achievable = com.max_achievable;
        return out;
    }
    if (!rad.feasible) {
        out.limiting_service = "rad";
        out.max_achievable = rad.max_achievable;
        return out;
    }
    out.feasible = true;
    for (std::size_t j = 0; j < split.idx_com.size(); ++j)
        out.power[split.idx_com[j]] = com.power[j];
    for (std::size_t j = 0; j < split.idx_rad.size(); ++j)
        out.power[split.idx_rad[j]] = rad.power[j];
    out.power_com = com.total;
    out.power_rad = rad.total;
    out.total_power = com.total + rad.total;
    out.rate = comm_rate(part, out.power, profile);
    out.mi = sensing_mi(part, out.power, profile);
    return out;
}

}  // namespace

JointAllocation allocate_joint(const SinrProfile& profile, double eta,
                               const QosConstraints& qos) {
    profile.validate();
    qos.validate();
    const SubcarrierPartition part = partition_subcarriers(profile, eta);
    const ServiceSplit split = split_by_partition(profile, part);
    const Waterfill com = waterfill(split.sinr_com, qos.rate_floor, qos.power_cap);
    const Waterfill rad = waterfill(split.sinr_rad, qos.mi_floor, qos.power_cap);
    return compose_allocation(profile, part, com, rad, split);
}

SweepResult sweep_eta(const SinrProfile& profile, const EtaRange& range,
                      const QosConstraints& qos) {
    const std::vector<double> etas = range.values();
    SweepResult sweep;
    sweep.points.resize(etas.size());
    std::vector<JointAllocation> allocations(etas.size());

#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < etas.size(); ++i) {
        allocations[i] = allocate_joint(profile, etas[i], qos);
        const JointAllocation& a = allocations[i];
        sweep.points[i] = {etas[i],          a.feasible,         a.partition.n_com,
                           a.partition.n_rad, a.power_com,        a.power_rad,
                           a.total_power,     a.limiting_service, a.max_achievable};
    }

    double best_total = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < etas.size(); ++i) {
        if (allocations[i].feasible && allocations[i].total_power < best_total) {
            best_total = allocations[i].total_power;
            sweep.best_index = i;
            sweep.any_feasible = true;
        }
    }
    if (sweep.any_feasible) {
        sweep.best_eta = etas[sweep.best_index];
        sweep.best = allocations[sweep.best_index];
    }
    return sweep;
}

BaselineSet raca_baselines(const SinrProfile& profile, double eta,
                           const QosConstraints& qos, RandomStream& rng) {
    profile.validate();
    qos.validate();
    BaselineSet set;

    const auto evaluate = [&](const SubcarrierPartition& part,
                              bool use_waterfill) {
        const ServiceSplit split = split_by_partition(profile, part);
        const Waterfill com =
            use_waterfill ? waterfill(split.sinr_com, qos.rate_floor, qos.power_cap)
                          : uniform_power(split.sinr_com, qos.rate_floor,
                                          qos.power_cap);
        const Waterfill rad =
            use_waterfill ? waterfill(split.sinr_rad, qos.mi_floor, qos.power_cap)
                          : uniform_power(split.sinr_rad, qos.mi_floor,
                                          qos.power_cap);
        BaselineResult res;
        res.feasible = com.feasible && rad.feasible;
        res.total_power = res.feasible ? com.total + rad.total : 0.0;
        return res;
    };

    const auto random_partition = [&]() {
        SubcarrierPartition part;
        part.to_com.resize(profile.size());
        for (std::size_t i = 0; i < profile.size(); ++i) {
            const bool com = rng.uniform() < 0.5;
            part.to_com[i] = com ? 1 : 0;
            if (com)
                ++part.n_com;
            else
                ++part.n_rad;
        }
        return part;
    };

    const SubcarrierPartition threshold = partition_subcarriers(profile, eta);
    set.threshold_uniform = evaluate(threshold, false);
    set.random_waterfill = evaluate(random_partition(), true);
    set.random_uniform = evaluate(random_partition(), false);
    return set;
}

}  // namespace isac
