// Copyright 2026 The dccsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dccsim/scenarios.hpp"

#include "dccsim/errors.hpp"
#include "dccsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace dccsim {

const char* to_string(ScenarioKind k)
{
    switch (k) {
    case ScenarioKind::StationaryPair: return "stationary_pair";
    case ScenarioKind::TwoWayMultiLane: return "two_way_multilane";
    case ScenarioKind::SmoothFlow: return "smooth_flow";
    case ScenarioKind::PackedLanes: return "packed_lanes";
    case ScenarioKind::Custom: return "custom";
    }
    return "?";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view s)
{
    for (auto k : {ScenarioKind::StationaryPair, ScenarioKind::TwoWayMultiLane, ScenarioKind::SmoothFlow,
                   ScenarioKind::PackedLanes, ScenarioKind::Custom})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

const VehiclePlacement* ScenarioSpec::find(VehicleId id) const
{
    for (const auto& v : vehicles)
        if (v.id == id) return &v;
    return nullptr;
}

VehicleId ScenarioSpec::role(const std::string& name) const
{
    const auto it = roles.find(name);
    if (it == roles.end()) throw ConfigError("scenario has no role '" + name + "'");
    return it->second;
}

ScenarioSpec build_stationary_pair(double distance_m, double tx_power_dbm, double antenna_gain_dbi)
{
    StationaryPairParams p;
    p.distance_m = distance_m;
    p.tx_power_dbm = tx_power_dbm;
    p.antenna_gain_dbi = antenna_gain_dbi;
    return build_stationary_pair(p);
}

ScenarioSpec build_stationary_pair(const StationaryPairParams& p)
{
    if (!(p.distance_m > 0.0)) throw ConfigError("stationary pair distance must be > 0");
    if (p.beacons == 0) throw ConfigError("stationary pair needs at least one beacon");

    ScenarioSpec spec;
    spec.kind = ScenarioKind::StationaryPair;
    spec.params = p;

    VehiclePlacement tx;
    tx.id = 1;
    tx.antenna_gain_dbi = p.antenna_gain_dbi;
    tx.initial_state = DccState::Restrictive;
    tx.pinned_state = DccState::Restrictive;
    tx.tx_power_override_dbm = p.tx_power_dbm;

    VehiclePlacement rx = tx;
    rx.id = 2;
    rx.x_m = p.distance_m;
    rx.tx_power_override_dbm.reset();
    rx.rx_sensitivity_override_dbm = p.rx_sensitivity_dbm;
    rx.beacons_enabled = false;

    spec.vehicles = {tx, rx};
    spec.observed = {1, 2};
    spec.roles = {{"transmitter", 1}, {"receiver", 2}};
    return spec;
}

ScenarioSpec build_two_way_multilane(const TwoWayMultiLaneParams& p)
{
    if (p.congested_lanes > 0 && !(p.vehicle_length_m > 0.0 && p.gap_m > 0.0))
        throw ConfigError("congested pitch must be positive");
    if (!(p.lane_width_m > 0.0) || p.median_m < 0.0) throw ConfigError("lane geometry must be positive");
    if (p.free_lanes == 0 || p.free_lane_lead == 0 || p.free_lane_follow == 0 || p.free_lane_lead > p.free_lanes ||
        p.free_lane_follow > p.free_lanes)
        throw ConfigError("free-direction lane indices must lie in [1, free_lanes]");
    if (!(p.free_separation_m > 0.0)) throw ConfigError("free-direction separation must be > 0");

    ScenarioSpec spec;
    spec.kind = ScenarioKind::TwoWayMultiLane;
    spec.params = p;

    const std::uint32_t n = p.vehicles_per_lane;
    const double pitch = p.pitch_m();
    VehicleId next_id = 1;
    for (std::uint32_t lane = 0; lane < p.congested_lanes; ++lane) {
        const double y = -(p.median_m / 2.0 + p.lane_width_m * (lane + 0.5));
        for (std::uint32_t k = 0; k < n; ++k) {
            VehiclePlacement v;
            v.id = next_id++;
            v.x_m = k * pitch;
            v.y_m = y;
            v.antenna_gain_dbi = p.antenna_gain_dbi;
            v.initial_state = DccState::Restrictive;
            spec.vehicles.push_back(v);
        }
    }

    const bool congested = p.congested_lanes > 0 && n > 0;
    double center_x = 0.0;
    if (congested) {
        // Middle vehicle of the second lane (or the only lane).
        const std::uint32_t lane = p.congested_lanes > 1 ? 1 : 0;
        const std::uint32_t k = n > 1 ? n / 2 - 1 : 0;
        const VehicleId center = 1 + lane * n + k;
        center_x = spec.vehicles[center - 1].x_m;
        spec.roles["congested_center"] = center;
        spec.observed.push_back(center);
    }

    // free_separation_m is the straight-line antenna distance; the lane offset eats into it.
    const double lateral = p.lane_width_m * std::abs(static_cast<double>(p.free_lane_lead) -
                                                      static_cast<double>(p.free_lane_follow));
    if (p.free_separation_m <= lateral)
        throw ConfigError("free-direction separation must exceed the lateral lane offset");
    const double longitudinal = std::sqrt(p.free_separation_m * p.free_separation_m - lateral * lateral);
    // The lead passes the congested midpoint at half the transit time.
    const double lead_x0 = center_x - p.speed_mps * p.transit_time_s / 2.0 + longitudinal / 2.0;
    auto free_vehicle = [&](std::uint32_t lane_1based, double x0) {
        VehiclePlacement v;
        v.id = next_id++;
        v.x_m = x0;
        v.y_m = p.median_m / 2.0 + p.lane_width_m * (lane_1based - 0.5);
        v.vx_mps = p.speed_mps;
        v.antenna_gain_dbi = p.antenna_gain_dbi;
        v.initial_state = DccState::Relaxed;
        spec.vehicles.push_back(v);
        return v.id;
    };
    const VehicleId lead = free_vehicle(p.free_lane_lead, lead_x0);
    const VehicleId follow = free_vehicle(p.free_lane_follow, lead_x0 - longitudinal);
    spec.roles["free_lead"] = lead;
    spec.roles["free_follow"] = follow;
    spec.observed.push_back(lead);
    spec.observed.push_back(follow);
    return spec;
}

ScenarioSpec build_smooth_flow(const SmoothFlowParams& p, std::uint64_t seed)
{
    if (p.lanes == 0 || p.vehicles_per_lane == 0) throw ConfigError("smooth flow needs lanes and vehicles");
    if (!(p.gap_min_m > 0.0 && p.gap_max_m >= p.gap_min_m)) throw ConfigError("smooth flow gap range invalid");
    if (!(p.road_length_m > 0.0)) throw ConfigError("smooth flow road length must be > 0");
    const double min_gap = p.fixed_gap_m.value_or(p.gap_min_m);
    if ((p.vehicles_per_lane - 1) * min_gap > p.road_length_m)
        throw ConfigError("smooth flow: " + std::to_string(p.vehicles_per_lane) + " vehicles per lane at >= " +
                          std::to_string(min_gap) + " m gaps exceed the " + std::to_string(p.road_length_m) +
                          " m road");
    const bool observe = p.observed_lane >= 1 && p.observed_lane <= p.lanes && p.observed_first_index >= 1 &&
                         p.observed_first_index + 2 <= p.vehicles_per_lane;
    if (!observe) throw ConfigError("smooth flow observed triple lies outside the lane population");

    ScenarioSpec spec;
    spec.kind = ScenarioKind::SmoothFlow;
    spec.params = p;

    constexpr double kLaneWidthM = 5.0;
    VehicleId next_id = 1;
    for (std::uint32_t lane = 0; lane < p.lanes; ++lane) {
        auto rng = make_stream(seed, lane, StreamPurpose::Scenario);
        double x = p.road_length_m;
        for (std::uint32_t k = 0; k < p.vehicles_per_lane; ++k) {
            if (k > 0) {
                double gap = p.gap_min_m + (p.gap_max_m - p.gap_min_m) * uniform01(rng);
                if (p.fixed_gap_m) gap = *p.fixed_gap_m;
                const bool observed_lane = lane + 1 == p.observed_lane;
                if (observed_lane && p.pin_observed_gaps) {
                    const std::uint32_t first = p.observed_first_index - 1;
                    if (k == first + 1) gap = p.observed_front_gap_m;
                    if (k == first + 2) gap = p.observed_rear_gap_m;
                }
                x -= gap;
            }
            VehiclePlacement v;
            v.id = next_id++;
            v.x_m = x;
            v.y_m = kLaneWidthM * (lane + 0.5);
            v.vx_mps = p.speed_mps;
            v.antenna_gain_dbi = p.antenna_gain_dbi;
            v.initial_state = DccState::Relaxed;
            spec.vehicles.push_back(v);
        }
    }

    const VehicleId first = 1 + (p.observed_lane - 1) * p.vehicles_per_lane + (p.observed_first_index - 1);
    spec.observed = {first, first + 1, first + 2};
    spec.roles = {{"front", first}, {"middle", first + 1}, {"rear", first + 2}};
    return spec;
}

ScenarioSpec build_packed_lanes(const PackedLanesParams& p)
{
    if (p.lanes == 0 || p.vehicles_per_lane == 0) throw ConfigError("packed lanes need lanes and vehicles");
    if (!(p.vehicle_length_m > 0.0 && p.gap_m > 0.0 && p.lane_width_m > 0.0))
        throw ConfigError("packed lane geometry must be positive");

    ScenarioSpec spec;
    spec.kind = ScenarioKind::PackedLanes;
    spec.params = p;
    const double pitch = p.vehicle_length_m + p.gap_m;
    VehicleId next_id = 1;
    for (std::uint32_t lane = 0; lane < p.lanes; ++lane) {
        for (std::uint32_t k = 0; k < p.vehicles_per_lane; ++k) {
            VehiclePlacement v;
            v.id = next_id++;
            v.x_m = k * pitch;
            v.y_m = p.lane_width_m * (lane + 0.5);
            v.antenna_gain_dbi = p.antenna_gain_dbi;
            v.initial_state = p.pinned_state.value_or(DccState::Relaxed);
            v.pinned_state = p.pinned_state;
            spec.vehicles.push_back(v);
        }
    }
    const VehicleId center = 1 + (p.lanes / 2) * p.vehicles_per_lane + p.vehicles_per_lane / 2;
    spec.observed = {center};
    spec.roles = {{"center", center}};
    return spec;
}

ScenarioSpec rebuild(const ScenarioSpec& spec, std::uint64_t seed)
{
    return std::visit(
        [&](const auto& p) -> ScenarioSpec {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, StationaryPairParams>) return build_stationary_pair(p);
            else if constexpr (std::is_same_v<P, TwoWayMultiLaneParams>) return build_two_way_multilane(p);
            else if constexpr (std::is_same_v<P, SmoothFlowParams>) return build_smooth_flow(p, seed);
            else if constexpr (std::is_same_v<P, PackedLanesParams>) return build_packed_lanes(p);
            else return spec;
        },
        spec.params);
}

void validate_geometry(const ScenarioSpec& spec)
{
    std::set<VehicleId> ids;
    std::set<std::pair<double, double>> positions;
    for (const auto& v : spec.vehicles) {
        if (!ids.insert(v.id).second) throw ConfigError("duplicate vehicle id " + std::to_string(v.id));
        if (!positions.insert({v.x_m, v.y_m}).second)
            throw ConfigError("vehicles share a position (id " + std::to_string(v.id) + ")");
        if (v.pinned_state && *v.pinned_state != v.initial_state)
            throw ConfigError("vehicle " + std::to_string(v.id) + " pinned state differs from its initial state");
    }
    for (auto id : spec.observed)
        if (!ids.contains(id)) throw ConfigError("observed vehicle " + std::to_string(id) + " does not exist");
}

} // namespace dccsim
