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

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>

namespace dccsim {

/// Per-rate reception parameters of the OFDM PHY.
struct PhyProfile {
    double phy_rate_mbps = 12.0;
    double rx_sensitivity_dbm = -77.0;
    double required_sinr_db = 15.0;
    double channel_bandwidth_mhz = 10.0;
};

/// Minimum input sensitivity for an OFDM rate. Throws ConfigError for an unsupported
/// (rate, bandwidth) pair.
double rx_sensitivity_for_rate(double phy_rate_mbps, double channel_bandwidth_mhz = 10.0);

/// SINR threshold used by the threshold reception model for the rate's modulation and coding.
double default_required_sinr_db(double phy_rate_mbps, double channel_bandwidth_mhz = 10.0);

PhyProfile phy_profile_for_rate(double phy_rate_mbps, double channel_bandwidth_mhz = 10.0);

/// Channel-wide PHY calibration.
struct PhyConfig {
    double channel_bandwidth_mhz = 10.0;
    double noise_figure_db = 10.0;
    /// Overrides of the per-rate SINR threshold, keyed by rate in Mbps.
    std::map<double, double> required_sinr_db;

    double noise_floor_dbm() const;
    double required_sinr_for(double phy_rate_mbps) const;
    void validate() const;
};

/// Broadcast channel access timing at 10 MHz.
struct MacParams {
    double slot_s = 13e-6;
    double aifs_s = 58e-6;
    std::uint32_t contention_window = 15;

    void validate() const;
};

/// Preamble + SIGNAL + data symbols for an OFDM frame.
double frame_airtime_s(std::uint32_t payload_bytes, double phy_rate_mbps, double channel_bandwidth_mhz = 10.0);

inline bool cca_busy(double observed_power_dbm, double cca_threshold_dbm)
{
    return observed_power_dbm >= cca_threshold_dbm;
}

inline bool cca_busy(double observed_power_dbm, double cca_threshold_dbm, bool decoding)
{
    return decoding || observed_power_dbm >= cca_threshold_dbm;
}

enum class Verdict : std::uint8_t {
    Delivered = 0,
    BelowSensitivity = 1,
    SinrFailure = 2,
    RxBusyTransmitting = 3,
};
inline constexpr std::size_t kVerdictCount = 4;

const char* to_string(Verdict v);

struct ReceptionInput {
    double rx_power_dbm;          // faded
    double rx_sensitivity_dbm;    // receiver's current profile
    double required_sinr_db;
    double noise_mw;
    double interference_mw;       // sum over temporally overlapping frames
    bool rx_transmitting;         // receiver transmitted during the frame
};

double sinr_db(double signal_mw, double noise_mw, double interference_mw);

Verdict reception_decision(const ReceptionInput& in);

struct BusyInterval {
    double start_s;
    double end_s;
};

/// Busy-time bookkeeping for one measurement window ending at window_start_s + window_length_s.
struct CbrWindow {
    double window_length_s = 1.0;
    double busy_time_accumulated_s = 0.0;
    double window_start_s = 0.0;

    double cbr() const { return window_length_s > 0.0 ? busy_time_accumulated_s / window_length_s : 0.0; }
};

/// Fills window.busy_time_accumulated_s with the union of the intervals clipped to the window
/// and returns the resulting busy ratio. Intervals may overlap and be unsorted.
double cbr_update(CbrWindow& window, std::span<const BusyInterval> busy_intervals);

/// Exact per-vehicle busy tracking with a trailing measurement window.
class BusyTracker {
public:
    explicit BusyTracker(double window_length_s = 1.0) : window_length_s_(window_length_s) {}

    void set_busy(double now_s);
    void set_idle(double now_s);
    bool busy() const { return busy_since_.has_value(); }

    /// CBR over [now - window, now]; prunes intervals that can no longer contribute.
    double cbr_at(double now_s);

    double window_length_s() const { return window_length_s_; }

private:
    double window_length_s_;
    std::deque<BusyInterval> closed_;
    std::optional<double> busy_since_;
};

/// Event-driven broadcast CSMA for one station. Slots count down only while the
/// medium is idle; a beacon that finds the medium idle waits one arbitration interval.
class CsmaState {
public:
    explicit CsmaState(MacParams mac = {}) : mac_(mac) {}

    /// New beacon at now. drawn_slots is consumed only if deferral is needed.
    /// Returns the transmission time if already known.
    std::optional<double> request(double now_s, bool medium_busy, std::uint32_t drawn_slots);

    /// Medium turned busy. An expiry at exactly now still transmits.
    void on_medium_busy(double now_s);

    /// Medium turned idle; returns the new expiry, if a beacon is pending.
    std::optional<double> on_medium_idle(double now_s);

    /// True if the pending beacon transmits at now; clears the pending state.
    bool fire(double now_s);

    void cancel();

    bool pending() const { return pending_; }
    std::optional<double> expiry() const { return expiry_; }

private:
    MacParams mac_;
    bool pending_ = false;
    bool backoff_active_ = false;
    std::uint32_t drawn_slots_ = 0;
    std::uint32_t slots_left_ = 0;
    double idle_origin_s_ = 0.0;
    std::optional<double> expiry_;
};

/// Closed-form CSMA start time over a station's merged, sorted busy intervals. Same rules
/// as CsmaState.
double csma_schedule(double due_s, std::span<const BusyInterval> busy_intervals, std::uint32_t drawn_slots,
                     const MacParams& mac);

} // namespace dccsim
