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
#include "dccsim/sweep.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dccsim::cli {

struct SweepDefinition {
    SweepParameter parameter = SweepParameter::RestrictiveTxPower;
    std::vector<double> values;
};

/// Everything a run or sweep needs. Every key is optional; unknown keys are errors.
struct RunConfigFile {
    SimConfig sim;
    std::uint32_t replications = 1;
    std::string output_dir = "dccsim_out";
    double pdr_bin_width_m = 2.5;
    std::optional<SweepDefinition> sweep;
};

/// Parses YAML text. Throws ConfigError carrying the 1-based line of the offending key.
RunConfigFile parse_run_config(std::string_view yaml_text);
RunConfigFile load_run_config(const std::filesystem::path& path);

/// Fully resolved YAML (all defaults expanded). parse_run_config(to_yaml(c)) reproduces c.
std::string to_yaml(const RunConfigFile& config);

/// Shortest text that parses back to the same double.
std::string format_exact(double v);

} // namespace dccsim::cli
