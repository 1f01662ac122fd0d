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
#include "dccsim/metrics.hpp"
#include "dccsim/sweep.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace dccsim {
namespace {

SimConfig pair_config(double distance_m, std::uint32_t beacons, std::uint64_t seed = 1)
{
    SimConfig c;
    c.seed = seed;
    StationaryPairParams p;
    p.distance_m = distance_m;
    p.beacons = beacons;
    c.scenario = build_stationary_pair(p);
    c.duration_s = stationary_pair_duration_s(p, c.dcc_table);
    return c;
}

std::string csv_of(const RunOutput& out)
{
    std::ostringstream os;
    write_cbr_timeseries_csv(os, out.cbr_samples);
    write_link_pdr_csv(os, link_stats(out.link_frames, 1.0));
    for (const auto& t : out.transitions) os << t.time_s << ',' << t.vehicle_id << ',' << static_cast<int>(t.to) << '\n';
    return os.str();
}

TEST(Engine, StationaryPairEmitsExactlyTheRequestedBeacons)
{
    const auto out = run(pair_config(5.0, 300));
    EXPECT_EQ(out.link_frames.size(), 300u);
    EXPECT_EQ(out.totals.frames_sent, 300u);
    for (const auto& f : out.link_frames) {
        EXPECT_EQ(f.tx_id, 1u);
        EXPECT_EQ(f.rx_id, 2u);
        EXPECT_NEAR(f.distance_m, 5.0, 1e-9);
        EXPECT_EQ(f.tx_state, DccState::Restrictive);
    }
}

class PairPdr : public ::testing::TestWithParam<double> {};

TEST_P(PairPdr, MatchesRicianTailProbability)
{
    const double d = GetParam();
    constexpr std::uint32_t n = 4000;
    const auto out = run(pair_config(d, n, 17));
    const double pdr = *link_pdr(out.link_frames, 1, 2);
    const double mean_dbm = -10.0 + 9.0 - oracle::fspl_db(d, 5900.0);
    const double expected = 1.0 - oracle::rician_power_cdf(std::pow(10.0, (-77.0 - mean_dbm) / 10.0), 3.0);
    const double sigma = std::sqrt(std::max(expected * (1.0 - expected), 1e-4) / n);
    EXPECT_NEAR(pdr, expected, 4.0 * sigma + 1e-3) << "d=" << d;
}

INSTANTIATE_TEST_SUITE_P(Distances, PairPdr, ::testing::Values(2.5, 13.0, 20.0, 30.0, 40.0));

TEST(Engine, WithoutFadingDeliveryIsAStepAtTheCrossover)
{
    for (double d : {25.0, 26.0}) {
        SimConfig c = pair_config(d, 50);
        c.env.fading_enabled = false;
        const auto out = run(c);
        const double crossover = crossover_distance_m(-10.0, 9.0, -77.0, c.env);
        EXPECT_DOUBLE_EQ(*link_pdr(out.link_frames, 1, 2), d < crossover ? 1.0 : 0.0) << d;
    }
}

TEST(Engine, SingleTransmitterLoadEqualsRateTimesAirtime)
{
    SimConfig c = pair_config(2.5, 400);
    c.env.fading_enabled = false;
    const auto out = run(c);
    double sum = 0.0;
    int n = 0;
    for (const auto& s : out.cbr_samples)
        if (s.vehicle_id == 2 && s.time_s >= 2.0) {
            sum += s.cbr;
            ++n;
        }
    ASSERT_GT(n, 100);
    EXPECT_NEAR(sum / n, 1.0 * oracle::ofdm_airtime_10mhz_s(250, 96), 5e-6);
}

TEST(Engine, DeterministicForFixedSeed)
{
    TwoWayMultiLaneParams p;
    p.vehicles_per_lane = 60;
    SimConfig c;
    c.duration_s = 8.0;
    c.scenario = build_two_way_multilane(p);
    const std::string a = csv_of(run(c));
    const std::string b = csv_of(run(c));
    EXPECT_EQ(a, b);
    c.seed = 2;
    EXPECT_NE(a, csv_of(run(c)));
}

TEST(Engine, TracesRespectDccDwellTimes)
{
    TwoWayMultiLaneParams p;
    p.vehicles_per_lane = 150;
    SimConfig c;
    c.duration_s = 20.0;
    c.scenario = build_two_way_multilane(p);
    const auto out = run(c);
    ASSERT_FALSE(out.transitions.empty());
    std::map<VehicleId, double> entered;
    int checked = 0;
    for (const auto& t : out.transitions) {
        EXPECT_EQ(std::abs(static_cast<int>(t.to) - static_cast<int>(t.from)), 1);
        if (t.from == DccState::Restrictive && entered.count(t.vehicle_id)) {
            EXPECT_GE(t.time_s - entered[t.vehicle_id], 5.0 - 1e-9);
            ++checked;
        }
        if (t.to == DccState::Restrictive) entered[t.vehicle_id] = t.time_s;
    }
    EXPECT_GT(checked, 0);
}

TEST(Engine, ForceStatePinsAndUnpins)
{
    SimConfig c = pair_config(5.0, 20);
    Engine e(c);
    e.force_state(1, DccState::Active);
    EXPECT_EQ(e.state_of(1), DccState::Active);
    e.run_until(5.0);
    EXPECT_EQ(e.state_of(1), DccState::Active);
    EXPECT_NEAR(e.now(), 5.0, 1e-9);
    EXPECT_THROW(e.force_state(99, DccState::Active), ConfigError);
    const auto out = e.finish();
    EXPECT_GT(out.link_frames.size(), 0u);
}

TEST(Engine, MobilityIsConstantVelocity)
{
    VehicleState v;
    v.position = {10.0, 2.0};
    v.velocity = {20.0, 0.0};
    v.position_time_s = 1.0;
    const auto w = advance_mobility(v, 3.5);
    EXPECT_DOUBLE_EQ(w.position.x, 60.0);
    EXPECT_DOUBLE_EQ(w.position.y, 2.0);
    EXPECT_DOUBLE_EQ(w.position_time_s, 3.5);
}

TEST(Engine, ConfigValidation)
{
    SimConfig c = pair_config(5.0, 10);
    c.duration_s = 0.0;
    EXPECT_THROW(run(c), ConfigError);
    c = pair_config(5.0, 10);
    c.metric_interval_s = 0.3;
    EXPECT_THROW(c.validate(), ConfigError);
    c = pair_config(5.0, 10);
    c.scenario.vehicles.clear();
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Engine, PinnedTxPowerChangesReach)
{
    SimConfig c = pair_config(60.0, 200);
    Engine low(c);
    const auto a = low.finish();
    Engine high(c);
    high.pin_tx_power(1, 16.0);
    const auto b = high.finish();
    EXPECT_LT(*link_pdr(a.link_frames, 1, 2), 0.05);
    EXPECT_GT(*link_pdr(b.link_frames, 1, 2), 0.9);
}

} // namespace
} // namespace dccsim
