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

#include "dccsim/sweep.hpp"

#include "dccsim/errors.hpp"

#include <string>
#include <variant>

namespace dccsim {

const char* to_string(SweepParameter p)
{
    switch (p) {
    case SweepParameter::RestrictiveTxPower: return "restrictive_tx_power";
    case SweepParameter::RxSensitivity: return "rx_sensitivity";
    case SweepParameter::Distance: return "distance";
    case SweepParameter::AntennaGain: return "antenna_gain";
    }
    return "?";
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view s)
{
    for (auto p : {SweepParameter::RestrictiveTxPower, SweepParameter::RxSensitivity, SweepParameter::Distance,
                   SweepParameter::AntennaGain})
        if (s == to_string(p)) return p;
    return std::nullopt;
}

double stationary_pair_duration_s(const StationaryPairParams& params, const DccParamTable& table)
{
    return params.beacons / table[DccState::Restrictive].beacon_rate_hz;
}

namespace {

void set_gain(ScenarioSpec& spec, double gain)
{
    std::visit(
        [&](auto& p) {
            if constexpr (requires { p.antenna_gain_dbi; }) p.antenna_gain_dbi = gain;
        },
        spec.params);
    if (spec.kind == ScenarioKind::Custom)
        for (auto& v : spec.vehicles) v.antenna_gain_dbi = gain;
}

SimConfig apply(const SimConfig& base, SweepParameter parameter, double value)
{
    SimConfig c = base;
    auto* pair = std::get_if<StationaryPairParams>(&c.scenario.params);
    switch (parameter) {
    case SweepParameter::RestrictiveTxPower:
        c.dcc_table = override_restrictive_tx(c.dcc_table, value);
        if (pair) pair->tx_power_dbm = value;
        break;
    case SweepParameter::RxSensitivity:
        c.dcc_table[DccState::Restrictive].rx_sensitivity_dbm = value;
        if (pair) pair->rx_sensitivity_dbm = value;
        break;
    case SweepParameter::Distance:
        if (!pair) throw ConfigError("distance sweep needs a stationary_pair scenario");
        pair->distance_m = value;
        break;
    case SweepParameter::AntennaGain: set_gain(c.scenario, value); break;
    }
    c.scenario = rebuild(c.scenario, c.seed);
    return c;
}

} // namespace

std::vector<std::pair<double, SimConfig>> sweep(const SimConfig& base, SweepParameter parameter,
                                                std::span<const double> values)
{
    std::vector<std::pair<double, SimConfig>> out;
    out.reserve(values.size());
    for (double v : values) out.emplace_back(v, apply(base, parameter, v));
    return out;
}

std::vector<std::pair<double, SimConfig>> sweep(const SimConfig& base, std::string_view parameter,
                                                std::span<const double> values)
{
    const auto p = parse_sweep_parameter(parameter);
    if (!p) throw ConfigError("unknown sweep parameter '" + std::string(parameter) + "'");
    return sweep(base, *p, values);
}

} // namespace dccsim
