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

#include "dccsim/dcc.hpp"
#include "dccsim/engine.hpp"
#include "dccsim/metrics.hpp"
#include "dccsim/phy_mac.hpp"
#include "dccsim/propagation.hpp"
#include "dccsim/rng.hpp"
#include "dccsim/sweep.hpp"

#include <benchmark/benchmark.h>
#include <cmath>

#include <vector>

namespace {

using namespace dccsim;

void BM_LinearPathGain(benchmark::State& state)
{
    const LinearPathGain gain{RadioEnvironment{}};
    double d2 = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gain(d2));
        d2 = d2 < 1e6 ? d2 * 1.01 : 1.0;
    }
}
BENCHMARK(BM_LinearPathGain);

void BM_RicianSample(benchmark::State& state)
{
    SplitMix64 g(stream_key(1, 2, 3));
    for (auto _ : state) benchmark::DoNotOptimize(rician_power_gain(3.0, g));
}
BENCHMARK(BM_RicianSample);

void BM_CsmaSchedule(benchmark::State& state)
{
    std::vector<BusyInterval> busy;
    for (int i = 0; i < state.range(0); ++i) busy.push_back({i * 300e-6, i * 300e-6 + 216e-6});
    const MacParams mac;
    for (auto _ : state) benchmark::DoNotOptimize(csma_schedule(0.0, busy, 7, mac));
}
BENCHMARK(BM_CsmaSchedule)->Arg(8)->Arg(256);

void BM_DccStep(benchmark::State& state)
{
    const DccParamTable table;
    DccTimerState timer;
    double now = 0.0;
    for (auto _ : state) {
        now += 0.2;
        const double cbr = static_cast<int>(now) % 14 < 7 ? 0.45 : 0.05;
        benchmark::DoNotOptimize(dcc_step(timer, cbr, now, table));
    }
}
BENCHMARK(BM_DccStep);

void BM_PowerLawFit(benchmark::State& state)
{
    std::vector<double> d, p;
    for (int i = 1; i <= 500; ++i) {
        d.push_back(0.1 * i + 2.0);
        p.push_back(1e-5 * std::pow(d.back(), -2.1) * (1.0 + 0.05 * std::sin(i)));
    }
    for (auto _ : state) benchmark::DoNotOptimize(fit_power_law(d, p));
}
BENCHMARK(BM_PowerLawFit);

void BM_StationaryPairRun(benchmark::State& state)
{
    SimConfig c;
    StationaryPairParams p;
    p.distance_m = 12.5;
    p.beacons = 1000;
    c.scenario = build_stationary_pair(p);
    c.duration_s = stationary_pair_duration_s(p, c.dcc_table);
    for (auto _ : state) benchmark::DoNotOptimize(run(c).totals.frames_sent);
}
BENCHMARK(BM_StationaryPairRun)->Unit(benchmark::kMillisecond);

void BM_TwoWayRun(benchmark::State& state)
{
    SimConfig c;
    c.duration_s = 5.0;
    TwoWayMultiLaneParams p;
    p.vehicles_per_lane = static_cast<std::uint32_t>(state.range(0));
    c.scenario = build_two_way_multilane(p);
    for (auto _ : state) benchmark::DoNotOptimize(run(c).totals.reception_attempts);
}
BENCHMARK(BM_TwoWayRun)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
