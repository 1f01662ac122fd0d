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

#include "dccsim/errors.hpp"

#include <cmath>
#include <string>

namespace dccsim {

namespace {

// Dwell comparisons tolerate accumulated tick rounding.
constexpr double kDwellEpsilon = 1e-9;

constexpr double kMinRegulatoryTxDbm = -10.0;
constexpr double kMaxRegulatoryTxDbm = 33.0;

bool held_long_enough(std::optional<double>& hold_start, bool condition, double now_s, double dwell_s)
{
    if (!condition) {
        hold_start.reset();
        return false;
    }
    if (!hold_start) hold_start = now_s;
    return now_s - *hold_start >= dwell_s - kDwellEpsilon;
}

} // namespace

const char* to_string(DccState s)
{
    switch (s) {
    case DccState::Relaxed: return "Relaxed";
    case DccState::Active: return "Active";
    case DccState::Restrictive: return "Restrictive";
    }
    return "?";
}

std::optional<DccState> parse_dcc_state(std::string_view s)
{
    if (s == "Relaxed" || s == "relaxed") return DccState::Relaxed;
    if (s == "Active" || s == "active") return DccState::Active;
    if (s == "Restrictive" || s == "restrictive") return DccState::Restrictive;
    return std::nullopt;
}

void DccParamTable::validate() const
{
    if (!(min_cbr_threshold > 0.0 && min_cbr_threshold < max_cbr_threshold && max_cbr_threshold < 1.0))
        throw ConfigError("dcc thresholds must satisfy 0 < min_cbr < max_cbr < 1");
    if (!(up_dwell_s > 0.0) || !(down_dwell_s > 0.0)) throw ConfigError("dcc dwell times must be > 0");
    if (down_dwell_s < up_dwell_s) throw ConfigError("dcc down_dwell_s must be >= up_dwell_s");
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& p = params[i];
        const std::string name = to_string(static_cast<DccState>(i));
        if (!(p.beacon_rate_hz > 0.0)) throw ConfigError("dcc." + name + ".beacon_rate_hz must be > 0");
        if (!(p.phy_rate_mbps > 0.0)) throw ConfigError("dcc." + name + ".phy_rate_mbps must be > 0");
        if (!std::isfinite(p.tx_power_dbm) || !std::isfinite(p.cca_threshold_dbm) ||
            !std::isfinite(p.rx_sensitivity_dbm))
            throw ConfigError("dcc." + name + " powers and thresholds must be finite");
    }
}

DccStepResult dcc_step(DccTimerState& timer, double cbr_sample, double now_s, const DccParamTable& table)
{
    if (!(cbr_sample >= 0.0 && cbr_sample <= 1.0))
        throw ContractViolation("CBR sample outside [0, 1]: " + std::to_string(cbr_sample));

    bool up = false;
    bool down = false;
    DccState next = timer.current;
    switch (timer.current) {
    case DccState::Relaxed:
        up = cbr_sample >= table.min_cbr_threshold;
        timer.down_hold_start_s.reset();
        if (held_long_enough(timer.up_hold_start_s, up, now_s, table.up_dwell_s)) next = DccState::Active;
        break;
    case DccState::Active:
        up = cbr_sample >= table.max_cbr_threshold;
        down = cbr_sample < table.min_cbr_threshold;
        if (held_long_enough(timer.up_hold_start_s, up, now_s, table.up_dwell_s))
            next = DccState::Restrictive;
        else if (held_long_enough(timer.down_hold_start_s, down, now_s, table.down_dwell_s))
            next = DccState::Relaxed;
        break;
    case DccState::Restrictive:
        down = cbr_sample < table.max_cbr_threshold;
        timer.up_hold_start_s.reset();
        if (held_long_enough(timer.down_hold_start_s, down, now_s, table.down_dwell_s)) next = DccState::Active;
        break;
    }

    const bool changed = next != timer.current;
    if (changed) {
        timer.current = next;
        timer.up_hold_start_s.reset();
        timer.down_hold_start_s.reset();
        timer.state_entry_time_s = now_s;
    }
    return {timer.current, table[timer.current], changed};
}

DccParamTable override_restrictive_tx(const DccParamTable& table, double new_tx_dbm)
{
    if (!(new_tx_dbm >= kMinRegulatoryTxDbm && new_tx_dbm <= kMaxRegulatoryTxDbm))
        throw ConfigError("restrictive tx power " + std::to_string(new_tx_dbm) + " dBm outside [-10, 33]");
    DccParamTable out = table;
    out[DccState::Restrictive].tx_power_dbm = new_tx_dbm;
    return out;
}

} // namespace dccsim
