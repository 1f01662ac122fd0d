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

#pragma once

#include "dccsim/dcc.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dccsim {

using VehicleId = std::uint32_t;

enum class ScenarioKind : std::uint8_t { StationaryPair, TwoWayMultiLane, SmoothFlow, PackedLanes, Custom };

const char* to_string(ScenarioKind k);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view s);

/// Parked transmitter/receiver pair at a fixed antenna distance.
struct StationaryPairParams {
    double distance_m = 2.5;
    double tx_power_dbm = -10.0;
    double antenna_gain_dbi = 4.5;
    double rx_sensitivity_dbm = -77.0;
    std::uint32_t beacons = 5000;
};

/// Jammed direction next to a free-flowing direction.
struct TwoWayMultiLaneParams {
    std::uint32_t congested_lanes = 4;
    std::uint32_t vehicles_per_lane = 400;
    double vehicle_length_m = 5.0;
    double gap_m = 1.5;
    double lane_width_m = 5.0;
    double median_m = 2.0;
    std::uint32_t free_lanes = 4;
    std::uint32_t free_lane_lead = 1; // 1-based
    std::uint32_t free_lane_follow = 4;
    double free_separation_m = 40.0;  // straight-line distance between the two antennas
    double speed_mps = 20.0;
    double antenna_gain_dbi = 4.5;
    /// Free vehicles are centered on the congested midpoint halfway through this time.
    double transit_time_s = 30.0;

    double pitch_m() const { return vehicle_length_m + gap_m; }
};

/// Same-direction traffic keeping safe headways, with one observed triple.
struct SmoothFlowParams {
    std::uint32_t lanes = 3;
    std::uint32_t vehicles_per_lane = 100;
    double road_length_m = 4000.0;
    double gap_min_m = 30.0;
    double gap_max_m = 60.0;
    double speed_mps = 20.0;
    double antenna_gain_dbi = 4.5;
    std::uint32_t observed_lane = 3;         // 1-based
    std::uint32_t observed_first_index = 53; // 1-based position within the lane
    bool pin_observed_gaps = true;
    double observed_front_gap_m = 40.0;
    double observed_rear_gap_m = 60.0;
    /// Forces every gap to this value when set (degenerate uniform headway).
    std::optional<double> fixed_gap_m;
};

/// Bumper-to-bumper stationary lanes, used for ambient channel load studies.
struct PackedLanesParams {
    std::uint32_t lanes = 3;
    std::uint32_t vehicles_per_lane = 300;
    double vehicle_length_m = 5.0;
    double gap_m = 1.5;
    double lane_width_m = 5.0;
    double antenna_gain_dbi = 4.5;
    std::optional<DccState> pinned_state = DccState::Restrictive;
};

struct VehiclePlacement {
    VehicleId id = 0;
    double x_m = 0.0;
    double y_m = 0.0;
    double vx_mps = 0.0;
    double vy_mps = 0.0;
    double antenna_gain_dbi = 4.5;
    DccState initial_state = DccState::Relaxed;
    std::optional<DccState> pinned_state;
    std::optional<double> tx_power_override_dbm;
    std::optional<double> rx_sensitivity_override_dbm;
    bool beacons_enabled = true;
};

using ScenarioParams =
    std::variant<StationaryPairParams, TwoWayMultiLaneParams, SmoothFlowParams, PackedLanesParams, std::monostate>;

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::Custom;
    ScenarioParams params = std::monostate{};
    std::vector<VehiclePlacement> vehicles;
    /// Vehicles recorded at full resolution; links among them are tracked per frame.
    std::vector<VehicleId> observed;
    /// Named roles, e.g. "congested_center" -> 600.
    std::map<std::string, VehicleId> roles;

    const VehiclePlacement* find(VehicleId id) const;
    VehicleId role(const std::string& name) const;
};

ScenarioSpec build_stationary_pair(double distance_m, double tx_power_dbm, double antenna_gain_dbi);
ScenarioSpec build_stationary_pair(const StationaryPairParams& params);
ScenarioSpec build_two_way_multilane(const TwoWayMultiLaneParams& params);
ScenarioSpec build_smooth_flow(const SmoothFlowParams& params, std::uint64_t seed);
ScenarioSpec build_packed_lanes(const PackedLanesParams& params);

/// Regenerates placements from the stored parameters (no-op for Custom).
ScenarioSpec rebuild(const ScenarioSpec& spec, std::uint64_t seed);

/// Unique ids, distinct positions, observed ids present. Throws ConfigError.
void validate_geometry(const ScenarioSpec& spec);

} // namespace dccsim
