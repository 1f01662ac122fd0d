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
#include "dccsim/phy_mac.hpp"
#include "dccsim/propagation.hpp"
#include "dccsim/scenarios.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace dccsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance_m(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Kinematic and protocol state of one vehicle.
struct VehicleState {
    VehicleId id = 0;
    Vec2 position;
    Vec2 velocity;
    double position_time_s = 0.0;
    DccTimerState dcc_timer;
    double antenna_gain_dbi = 0.0;
    double next_beacon_due_s = 0.0;
    std::uint32_t beacon_sequence = 0;
};

/// Constant-velocity update of the position to to_time_s.
VehicleState advance_mobility(const VehicleState& vehicle, double to_time_s);

inline constexpr double kmh_to_mps(double kmh) { return kmh / 3.6; }

struct SimConfig {
    double duration_s = 30.0;
    std::uint64_t seed = 1;
    RadioEnvironment env;
    DccParamTable dcc_table;
    PhyConfig phy;
    MacParams mac;
    ScenarioSpec scenario;
    std::uint32_t payload_bytes = 250;
    double cbr_period_s = 0.2;
    double cbr_window_s = 1.0;
    double metric_interval_s = 1.0;
    double relevance_radius_m = 1000.0;
    double discard_first_s = 2.0;

    /// Throws ConfigError on the first violated invariant.
    void validate() const;
};

struct CbrSample {
    double time_s;
    VehicleId vehicle_id;
    double cbr;
    DccState state;
};

struct StateTransition {
    double time_s;
    VehicleId vehicle_id;
    DccState from;
    DccState to;
};

/// One reception attempt on a link between two observed vehicles.
struct LinkFrameRecord {
    double tx_start_s;
    VehicleId tx_id;
    VehicleId rx_id;
    std::uint32_t sequence_number;
    double distance_m;
    double rx_power_dbm;
    Verdict verdict;
    DccState tx_state;
    DccState rx_state;
};

struct VehicleCounters {
    VehicleId id;
    std::uint64_t beacons_generated = 0;
    std::uint64_t frames_sent = 0;
    std::uint64_t beacons_dropped = 0;
};

struct RunTotals {
    std::uint64_t beacons_generated = 0;
    std::uint64_t frames_sent = 0;
    std::uint64_t beacons_dropped = 0;
    std::uint64_t reception_attempts = 0;
    std::array<std::uint64_t, kVerdictCount> verdicts{};
};

struct RunOutput {
    /// Observed vehicles every CBR evaluation; all others once per metric interval.
    std::vector<CbrSample> cbr_samples;
    std::vector<LinkFrameRecord> link_frames;
    std::vector<StateTransition> transitions;
    std::vector<VehicleCounters> vehicles;
    RunTotals totals;
    double duration_s = 0.0;
};

/// Single-threaded discrete-event simulator for one (config, seed).
class Engine {
public:
    explicit Engine(SimConfig config);
    ~Engine();
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;
    Engine(Engine&&) noexcept;
    Engine& operator=(Engine&&) noexcept;

    /// Pins a vehicle's DCC state; dcc_step is bypassed until unpinned.
    void force_state(VehicleId id, DccState state);
    /// Pins only the transmit power; the DCC state keeps evolving.
    void pin_tx_power(VehicleId id, double tx_power_dbm);
    void unpin(VehicleId id);

    /// Processes all events up to and including t (bounded by the duration).
    void run_until(double t_s);
    /// Runs to the configured duration, drains in-flight frames and returns the records.
    RunOutput finish();

    double now() const;
    VehicleState vehicle(VehicleId id) const;
    DccState state_of(VehicleId id) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Convenience: Engine(config).finish().
RunOutput run(const SimConfig& config);

} // namespace dccsim
