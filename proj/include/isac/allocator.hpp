// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: joint radar sensing and communication simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0

/**
 * @file allocator.hpp
 * @brief Subcarrier partitioning and transmit power minimization.
 *
 * Subcarriers are split between the downlink and the sensing service by an
 * SINR-ratio threshold, then each service receives the minimum-power
 * water-filling solution meeting its quality floor under a per-carrier cap.
 * Infeasibility is reported as data (with the maximum achievable value), not
 * as an error: callers decide how to react.
 */

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "isac/rng.hpp"

namespace isac {

/// Per-subcarrier unit-power SINRs for the two services, index 0 = carrier 1.
struct SinrProfile {
    std::vector<double> com;
    std::vector<double> rad;

    std::size_t size() const { return com.size(); }
    void validate() const {
        if (com.size() != rad.size() || com.empty())
            throw std::invalid_argument("SinrProfile: need equal non-empty columns");
        for (std::size_t i = 0; i < com.size(); ++i)
            if (!(com[i] > 0.0) || !(rad[i] > 0.0))
                throw std::invalid_argument("SinrProfile: SINRs must be > 0");
    }
};

/// Quality floors and the per-carrier power cap.
struct QosConstraints {
    double rate_floor = 200.0;  ///< Minimum summed downlink rate [bit/s/Hz].
    double mi_floor = 600.0;    ///< Minimum summed sensing information [bit/s/Hz].
    double power_cap = 50.0;    ///< Per-carrier maximum power [W].

    void validate() const {
        if (rate_floor < 0.0 || mi_floor < 0.0)
            throw std::invalid_argument("QosConstraints: floors must be >= 0");
        if (!(power_cap > 0.0))
            throw std::invalid_argument("QosConstraints: power_cap must be > 0");
    }
};

/// Threshold sweep range; values min, min+step, ..., up to max inclusive
/// (within half a step of rounding).
struct EtaRange {
    double min = 0.1;
    double max = 3.0;
    double step = 0.1;

    std::vector<double> values() const;
    void validate() const {
        if (!(step > 0.0) || max < min)
            throw std::invalid_argument("EtaRange: need step > 0 and max >= min");
    }
};

/// Service assignment per subcarrier: true = downlink, false = sensing.
struct SubcarrierPartition {
    std::vector<std::uint8_t> to_com;
    std::size_t n_com = 0;
    std::size_t n_rad = 0;
};

/// Assigns each subcarrier to the downlink when its downlink SINR is at
/// least eta times its sensing SINR (ties go to the downlink).
SubcarrierPartition partition_subcarriers(const SinrProfile& profile, double eta);

/// Summed downlink rate of the carriers assigned to the downlink.
double comm_rate(const SubcarrierPartition& partition,
                 std::span<const double> power, const SinrProfile& profile);

/// Summed sensing information of the carriers assigned to sensing.
double sensing_mi(const SubcarrierPartition& partition,
                  std::span<const double> power, const SinrProfile& profile);

/// Water-filling result for one service over its carrier subset.
struct Waterfill {
    bool feasible = false;
    std::vector<double> power;    ///< Per subset carrier, same order as input.
    double total = 0.0;
    double achieved = 0.0;        ///< Rate/information at the returned powers.
    double max_achievable = 0.0;  ///< Value with every carrier at the cap.
    double water_level = 0.0;
    bool capped = false;          ///< Any carrier clamped at the cap.
};

/**
 * @brief Minimum-power water-filling over one carrier subset.
 *
 * Per-carrier power is the water level minus the inverse SINR, clamped to
 * [0, cap]. The level is found by bisection until the achieved value is
 * within 1e-9 of the floor (or the bracket is exhausted); monotonicity of
 * the achieved value in the level makes the bracket [min inv-SINR,
 * max inv-SINR + cap] valid. A floor of zero yields all-zero power.
 */
Waterfill waterfill(std::span<const double> sinrs, double floor, double cap);

/// Joint allocation outcome at one threshold.
struct JointAllocation {
    bool feasible = false;
    /// Service that failed when infeasible ("com" or "rad"), else empty.
    std::string limiting_service;
    double max_achievable = 0.0;  ///< For the limiting service.
    SubcarrierPartition partition;
    std::vector<double> power;    ///< Per subcarrier, full band.
    double total_power = 0.0;
    double power_com = 0.0;
    double power_rad = 0.0;
    double rate = 0.0;
    double mi = 0.0;
};

/// Partitions at eta and water-fills each service against its floor.
JointAllocation allocate_joint(const SinrProfile& profile, double eta,
                               const QosConstraints& qos);

struct SweepPoint {
    double eta = 0.0;
    bool feasible = false;
    std::size_t n_com = 0;
    std::size_t n_rad = 0;
    double power_com = 0.0;
    double power_rad = 0.0;
    double power_total = 0.0;
    /// Failing service and its ceiling when infeasible.
    std::string limiting_service;
    double max_achievable = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    bool any_feasible = false;
    std::size_t best_index = 0;   ///< Lowest-total feasible point (first wins ties).
    double best_eta = 0.0;
    JointAllocation best;         ///< Full allocation at the best threshold.
};

/// Evaluates the joint allocation across the threshold grid and keeps the
/// cheapest feasible point.
SweepResult sweep_eta(const SinrProfile& profile, const EtaRange& range,
                      const QosConstraints& qos);

/// One baseline outcome.
struct BaselineResult {
    bool feasible = false;
    double total_power = 0.0;
};

struct BaselineSet {
    BaselineResult threshold_uniform;  ///< Threshold partition, uniform power.
    BaselineResult random_waterfill;   ///< Random partition, water-filling.
    BaselineResult random_uniform;     ///< Random partition, uniform power.
};

/**
 * @brief Reference allocators at a fixed threshold.
 *
 * Uniform-power variants use the smallest common per-carrier power meeting
 * the floor (bisection, capped). Random partitions draw one fair coin per
 * subcarrier from the provided stream, in carrier order, one partition per
 * random baseline.
 */
BaselineSet raca_baselines(const SinrProfile& profile, double eta,
                           const QosConstraints& qos, RandomStream& rng);

}  // namespace isac
