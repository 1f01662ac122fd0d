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

#include "dccsim/engine.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace dccsim {

enum class SweepParameter : std::uint8_t { RestrictiveTxPower, RxSensitivity, Distance, AntennaGain };

const char* to_string(SweepParameter p);
std::optional<SweepParameter> parse_sweep_parameter(std::string_view s);

/// One config per value, sharing the seed and every other field. Tx power and sensitivity
/// act on the Restrictive row (and on the pinned pair, if any); distance needs a
/// stationary-pair scenario; antenna gain regenerates the placements.
/// Throws ConfigError on an unknown parameter name or an inapplicable scenario.
std::vector<std::pair<double, SimConfig>> sweep(const SimConfig& base, SweepParameter parameter,
                                                std::span<const double> values);
std::vector<std::pair<double, SimConfig>> sweep(const SimConfig& base, std::string_view parameter,
                                                std::span<const double> values);

/// Run length that emits exactly params.beacons beacons at the Restrictive rate.
double stationary_pair_duration_s(const StationaryPairParams& params, const DccParamTable& table);

} // namespace dccsim
