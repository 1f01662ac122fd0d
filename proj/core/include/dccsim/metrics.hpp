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

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dccsim {

/// One frame outcome keyed by link distance.
struct DistanceOutcome {
    double distance_m;
    bool delivered;
};

struct PdrBin {
    double bin_low_m;
    double bin_high_m;
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    /// Undefined when sent == 0.
    std::optional<double> pdr() const;
};

/// Bins keyed by [low, high). Empty interior bins are kept with sent = 0.
std::vector<PdrBin> pdr_vs_distance(std::span<const DistanceOutcome> outcomes, double bin_width_m);
std::vector<PdrBin> pdr_vs_distance(std::span<const LinkFrameRecord> records, double bin_width_m);

struct LinkStats {
    VehicleId tx_id;
    VehicleId rx_id;
    double time_bucket_s;
    std::uint32_t sent = 0;
    std::uint32_t delivered = 0;
    std::array<std::uint32_t, kVerdictCount> verdicts{};
    double mean_distance_m = 0.0;

    std::optional<double> pdr() const;
};

/// Per-link, per-bucket aggregation, ordered by (tx, rx, bucket).
std::vector<LinkStats> link_stats(std::span<const LinkFrameRecord> records, double bucket_s);

/// Delivered / sent over one directed link for frames starting at or after from_s.
std::optional<double> link_pdr(std::span<const LinkFrameRecord> records, VehicleId tx, VehicleId rx,
                               double from_s = 0.0);

/// Mean of the per-bucket PDRs (buckets with sent > 0) for one directed link.
std::optional<double> mean_bucket_pdr(std::span<const LinkStats> stats, VehicleId tx, VehicleId rx,
                                      double from_s = 0.0);

struct PowerPoint {
    double distance_m;
    double rx_power_dbm;
};

/// y = a * d^b fitted in linear power (mW).
struct PowerCurveFit {
    double a = 0.0;
    double b = 0.0;
    double sse = 0.0;  // in mW^2
    double crossover_m = 0.0;
    std::size_t points = 0;
    int iterations = 0;

    double power_mw(double distance_m) const;
    double power_dbm(double distance_m) const;
};

/// Nonlinear least squares on linear-domain samples, seeded from a log-log regression.
/// Needs >= 3 points at >= 2 distinct distances, all positive; throws DataError otherwise.
PowerCurveFit fit_power_law(std::span<const double> distance_m, std::span<const double> power_mw);

/// Fits dBm samples in the mW domain and reports where the curve crosses sensitivity_dbm.
PowerCurveFit fit_power_curve(std::span<const PowerPoint> points, double sensitivity_dbm = -77.0);

struct CbrGroupSummary {
    double group_value;
    double mean_cbr;
    std::size_t vehicles;
};

/// Average CBR of a sample set after discard_first_s: per-vehicle time mean, then mean over vehicles.
double mean_ambient_cbr(std::span<const CbrSample> samples, double discard_first_s);

/// One summary per (group value, samples) pair, e.g. per swept Tx power.
std::vector<CbrGroupSummary> ambient_cbr_summary(
    std::span<const std::pair<double, std::span<const CbrSample>>> groups, double discard_first_s);

struct StateInterval {
    DccState state;
    double start_s;
    double end_s;
    /// True if the interval is cut by the end of the observation window.
    bool open_ended = false;

    double length_s() const { return end_s - start_s; }
};

/// Run-length encoding of one vehicle's sampled states. Consecutive intervals share
/// endpoints and cover [first sample, last sample].
std::vector<StateInterval> state_timeline(std::span<const CbrSample> samples, VehicleId vehicle_id);

/// Time ranges in which both timelines are in `state`.
std::vector<StateInterval> co_state_intervals(std::span<const StateInterval> a, std::span<const StateInterval> b,
                                              DccState state = DccState::Restrictive);

/// 6 significant digits, as used by every CSV artifact.
std::string format_number(double v);

inline constexpr const char* kUndefinedMarker = "NA";

void write_pdr_vs_distance_csv(std::ostream& os, std::span<const PdrBin> bins);
void write_cbr_timeseries_csv(std::ostream& os, std::span<const CbrSample> samples);
void write_link_pdr_csv(std::ostream& os, std::span<const LinkStats> stats);
void write_fit_csv(std::ostream& os, const PowerCurveFit& fit);

} // namespace dccsim
