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
#include "dccsim_cli/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace dccsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct Replication {
    std::uint64_t seed;
    RunOutput output;
};

/// Runs seeds base.seed .. base.seed + count - 1 on up to `threads` workers. The result is
/// ordered by seed whatever the completion order.
std::vector<Replication> run_replications(const SimConfig& base, std::uint32_t count, unsigned threads = 0);

/// Per-seed directories plus seed-prefixed merged CSVs and the resolved manifest.
void write_run_directory(const std::filesystem::path& dir, const RunConfigFile& config,
                         const std::vector<Replication>& reps);

/// Entry point shared by the executable and the tests. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace dccsim::cli
