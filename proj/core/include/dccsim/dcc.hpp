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

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace dccsim {

enum class DccState : std::uint8_t { Relaxed = 0, Active = 1, Restrictive = 2 };

const char* to_string(DccState s);
std::optional<DccState> parse_dcc_state(std::string_view s);

/// Transmit/receive settings a station uses while in one DCC state.
struct StateParams {
    double tx_power_dbm;
    double cca_threshold_dbm;
    double beacon_rate_hz;
    double phy_rate_mbps;
    double rx_sensitivity_dbm;

    friend bool operator==(const StateParams&, const StateParams&) = default;
};

/// Per-state parameter sets plus the CBR thresholds and dwell times driving transitions.
struct DccParamTable {
    std::array<StateParams, 3> params{{
        // Relaxed
        {33.0, -95.0, 2.0, 6.0, -82.0},
        // Active
        {23.0, -85.0, 2.0, 6.0, -82.0},
        // Restrictive
        {-10.0, -65.0, 1.0, 12.0, -77.0},
    }};
    double min_cbr_threshold = 0.15;
    double max_cbr_threshold = 0.40;
    double up_dwell_s = 1.0;
    double down_dwell_s = 5.0;

    StateParams& operator[](DccState s) { return params[static_cast<std::size_t>(s)]; }
    const StateParams& operator[](DccState s) const { return params[static_cast<std::size_t>(s)]; }

    /// Throws ConfigError if an invariant does not hold.
    void validate() const;

    friend bool operator==(const DccParamTable&, const DccParamTable&) = default;
};

/// Hold timers for the pending up/down transitions of one station.
struct DccTimerState {
    DccState current = DccState::Relaxed;
    std::optional<double> up_hold_start_s;
    std::optional<double> down_hold_start_s;
    double state_entry_time_s = 0.0;
};

struct DccStepResult {
    DccState state;
    StateParams params;
    bool changed;
};

/// Feeds one CBR sample taken at now_s. Up-transitions (Relaxed->Active, Active->Restrictive)
/// need their condition to hold for up_dwell_s; down-transitions need down_dwell_s. A hold
/// timer restarts whenever its condition lapses.
DccStepResult dcc_step(DccTimerState& timer, double cbr_sample, double now_s, const DccParamTable& table);

inline const StateParams& params_for(DccState state, const DccParamTable& table) { return table[state]; }

/// Remediation: same table with the Restrictive transmit power replaced. Range [-10, 33] dBm.
DccParamTable override_restrictive_tx(const DccParamTable& table, double new_tx_dbm);

} // namespace dccsim
