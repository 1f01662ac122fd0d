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

#include "dccsim/engine.hpp"
#include "dccsim/errors.hpp"
#include "dccsim/scenarios.hpp"
#include "dccsim/sweep.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

namespace dccsim {
namespace {

double dist(const VehiclePlacement& a, const VehiclePlacement& b) { return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m); }

TEST(Scenarios, StationaryPairGeometry)
{
    const auto s = build_stationary_pair(7.5, 0.0, 3.0);
    ASSERT_EQ(s.vehicles.size(), 2u);
    EXPECT_NEAR(dist(s.vehicles[0], s.vehicles[1]), 7.5, 1e-12);
    EXPECT_EQ(s.vehicles[0].tx_power_override_dbm, 0.0);
    EXPECT_EQ(s.vehicles[1].antenna_gain_dbi, 3.0);
    EXPECT_FALSE(s.vehicles[1].beacons_enabled);
    EXPECT_THROW(build_stationary_pair(0.0, -10.0, 4.5), ConfigError);
}

TEST(Scenarios, TwoWayPitchAndFreePair)
{
    const TwoWayMultiLaneParams p;
    const auto s = build_two_way_multilane(p);
    EXPECT_EQ(s.vehicles.size(), 4u * 400u + 2u);
    EXPECT_DOUBLE_EQ(p.pitch_m(), 6.5);

    const auto center = s.find(s.role("congested_center"));
    ASSERT_NE(center, nullptr);
    EXPECT_EQ(center->initial_state, DccState::Restrictive);
    // Same lane: nearest at 6.5 m, second-next at 13 m.
    std::vector<double> same_lane;
    for (const auto& v : s.vehicles)
        if (v.id != center->id && v.y_m == center->y_m && v.vx_mps == 0.0) same_lane.push_back(dist(v, *center));
    std::sort(same_lane.begin(), same_lane.end());
    ASSERT_GE(same_lane.size(), 4u);
    EXPECT_NEAR(same_lane[0], 6.5, 1e-9);
    EXPECT_NEAR(same_lane[2], 13.0, 1e-9);

    const auto a = s.find(s.role("free_lead"));
    const auto b = s.find(s.role("free_follow"));
    ASSERT_TRUE(a && b);
    EXPECT_NEAR(dist(*a, *b), 40.0, 1e-9);
    EXPECT_EQ(a->initial_state, DccState::Relaxed);
    EXPECT_NEAR(a->vx_mps, 20.0, 1e-12);
    EXPECT_EQ(a->vx_mps, b->vx_mps);
    for (auto id : {center->id, a->id, b->id})
        EXPECT_NE(std::find(s.observed.begin(), s.observed.end(), id), s.observed.end());
}

TEST(Scenarios, TwoWayWithoutCongestionIsThePair)
{
    TwoWayMultiLaneParams p;
    p.vehicles_per_lane = 0;
    const auto s = build_two_way_multilane(p);
    EXPECT_EQ(s.vehicles.size(), 2u);
    TwoWayMultiLaneParams bad;
    bad.free_separation_m = 10.0; // shorter than the lane offset
    EXPECT_THROW(build_two_way_multilane(bad), ConfigError);
}

TEST(Scenarios, SmoothFlowDefaults)
{
    const SmoothFlowParams p;
    const auto s = build_smooth_flow(p, 3);
    ASSERT_EQ(s.vehicles.size(), 300u);
    ASSERT_EQ(s.observed.size(), 3u);
    const auto* front = s.find(s.observed[0]);
    const auto* mid = s.find(s.observed[1]);
    const auto* rear = s.find(s.observed[2]);
    EXPECT_NEAR(dist(*front, *mid), 40.0, 1e-9);
    EXPECT_NEAR(dist(*mid, *rear), 60.0, 1e-9);

    std::map<double, std::vector<double>> lanes;
    for (const auto& v : s.vehicles) {
        lanes[v.y_m].push_back(v.x_m);
        EXPECT_EQ(v.initial_state, DccState::Relaxed);
        EXPECT_NEAR(v.vx_mps, 20.0, 1e-12);
    }
    std::set<double> pinned{front->x_m, mid->x_m};
    for (auto& [y, xs] : lanes) {
        std::sort(xs.rbegin(), xs.rend());
        for (std::size_t i = 1; i < xs.size(); ++i) {
            if (y == front->y_m && pinned.count(xs[i - 1])) continue;
            const double gap = xs[i - 1] - xs[i];
            EXPECT_GE(gap, 30.0);
            EXPECT_LE(gap, 60.0);
        }
    }
}

TEST(Scenarios, SmoothFlowDeterminism)
{
    const SmoothFlowParams p;
    const auto a = build_smooth_flow(p, 11);
    const auto b = build_smooth_flow(p, 11);
    const auto c = build_smooth_flow(p, 12);
    ASSERT_EQ(a.vehicles.size(), b.vehicles.size());
    bool differs = false;
    for (std::size_t i = 0; i < a.vehicles.size(); ++i) {
        EXPECT_EQ(a.vehicles[i].id, b.vehicles[i].id);
        EXPECT_EQ(a.vehicles[i].x_m, b.vehicles[i].x_m);
        differs |= a.vehicles[i].x_m != c.vehicles[i].x_m;
    }
    EXPECT_TRUE(differs);
}

TEST(Scenarios, SmoothFlowFixedGap)
{
    SmoothFlowParams p;
    p.fixed_gap_m = 35.0;
    p.pin_observed_gaps = false;
    const auto s = build_smooth_flow(p, 1);
    for (std::size_t i = 1; i < 100; ++i) EXPECT_NEAR(s.vehicles[i - 1].x_m - s.vehicles[i].x_m, 35.0, 1e-9);
    SmoothFlowParams crowded;
    crowded.road_length_m = 1000.0;
    EXPECT_THROW(build_smooth_flow(crowded, 1), ConfigError);
}

TEST(Scenarios, PackedLanes)
{
    const auto s = build_packed_lanes(PackedLanesParams{});
    EXPECT_EQ(s.vehicles.size(), 900u);
    for (const auto& v : s.vehicles) EXPECT_EQ(v.pinned_state, DccState::Restrictive);
    EXPECT_NO_THROW(validate_geometry(s));
}

TEST(Scenarios, GeometryValidation)
{
    auto s = build_stationary_pair(5.0, -10.0, 4.5);
    s.vehicles[1].id = s.vehicles[0].id;
    EXPECT_THROW(validate_geometry(s), ConfigError);
    s = build_stationary_pair(5.0, -10.0, 4.5);
    s.vehicles[1].x_m = s.vehicles[0].x_m;
    EXPECT_THROW(validate_geometry(s), ConfigError);
    s = build_stationary_pair(5.0, -10.0, 4.5);
    s.observed.push_back(77);
    EXPECT_THROW(validate_geometry(s), ConfigError);
}

TEST(Scenarios, KindNames)
{
    for (auto k : {ScenarioKind::StationaryPair, ScenarioKind::TwoWayMultiLane, ScenarioKind::SmoothFlow,
                   ScenarioKind::PackedLanes, ScenarioKind::Custom})
        EXPECT_EQ(parse_scenario_kind(to_string(k)), k);
    EXPECT_FALSE(parse_scenario_kind("highway").has_value());
}

SimConfig pair_base()
{
    SimConfig c;
    c.seed = 9;
    c.scenario = build_stationary_pair(StationaryPairParams{});
    return c;
}

TEST(Sweep, EmptyValuesGiveEmptyOutput)
{
    EXPECT_TRUE(sweep(pair_base(), SweepParameter::Distance, {}).empty());
}

TEST(Sweep, RestrictiveTxPower)
{
    const std::vector<double> v{-10, 0, 10, 16, 23};
    const auto out = sweep(pair_base(), "restrictive_tx_power", v);
    ASSERT_EQ(out.size(), 5u);
    for (std::size_t i = 0; i < v.size(); ++i) {
        EXPECT_EQ(out[i].first, v[i]);
        EXPECT_EQ(out[i].second.dcc_table[DccState::Restrictive].tx_power_dbm, v[i]);
        EXPECT_EQ(out[i].second.scenario.vehicles[0].tx_power_override_dbm, v[i]);
        EXPECT_EQ(out[i].second.seed, 9u);
    }
}

TEST(Sweep, SensitivityDistanceAndGain)
{
    const std::vector<double> s{-77, -95};
    const auto a = sweep(pair_base(), SweepParameter::RxSensitivity, s);
    EXPECT_EQ(a[1].second.scenario.vehicles[1].rx_sensitivity_override_dbm, -95.0);
    EXPECT_EQ(a[1].second.dcc_table[DccState::Restrictive].rx_sensitivity_dbm, -95.0);

    const std::vector<double> d{5, 10};
    const auto b = sweep(pair_base(), SweepParameter::Distance, d);
    EXPECT_NEAR(b[1].second.scenario.vehicles[1].x_m - b[1].second.scenario.vehicles[0].x_m, 10.0, 1e-12);

    const std::vector<double> g{0, 3};
    const auto c = sweep(pair_base(), SweepParameter::AntennaGain, g);
    for (const auto& v : c[1].second.scenario.vehicles) EXPECT_EQ(v.antenna_gain_dbi, 3.0);
}

TEST(Sweep, Errors)
{
    const std::vector<double> v{1.0};
    EXPECT_THROW(sweep(pair_base(), "speed", v), ConfigError);
    SimConfig c;
    c.scenario = build_packed_lanes(PackedLanesParams{});
    EXPECT_THROW(sweep(c, SweepParameter::Distance, v), ConfigError);
}

} // namespace
} // namespace dccsim
