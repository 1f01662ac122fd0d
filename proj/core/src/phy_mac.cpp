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

#include "dccsim/phy_mac.hpp"

#include "dccsim/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace dccsim {

namespace {

struct OfdmRate {
    double rate_10mhz_mbps;
    std::uint32_t data_bits_per_symbol;
    double sensitivity_10mhz_dbm;
    double required_sinr_db;
};

// 802.11 OFDM rates at 10 MHz channel spacing (BPSK 1/2 .. 64-QAM 3/4).
constexpr std::array<OfdmRate, 8> kRates{{
    {3.0, 24, -85.0, 5.0},
    {4.5, 36, -84.0, 6.0},
    {6.0, 48, -82.0, 8.0},
    {9.0, 72, -80.0, 11.0},
    {12.0, 96, -77.0, 15.0},
    {18.0, 144, -73.0, 18.0},
    {24.0, 192, -69.0, 22.0},
    {27.0, 216, -68.0, 24.0},
}};

double bandwidth_factor(double channel_bandwidth_mhz)
{
    if (channel_bandwidth_mhz == 5.0) return 0.5;
    if (channel_bandwidth_mhz == 10.0) return 1.0;
    if (channel_bandwidth_mhz == 20.0) return 2.0;
    throw ConfigError("unsupported channel bandwidth " + std::to_string(channel_bandwidth_mhz) + " MHz");
}

const OfdmRate& lookup_rate(double phy_rate_mbps, double channel_bandwidth_mhz)
{
    const double factor = bandwidth_factor(channel_bandwidth_mhz);
    const double rate10 = phy_rate_mbps / factor;
    for (const auto& r : kRates)
        if (std::abs(r.rate_10mhz_mbps - rate10) < 1e-9) return r;
    throw ConfigError("unsupported PHY rate " + std::to_string(phy_rate_mbps) + " Mbps at " +
                      std::to_string(channel_bandwidth_mhz) + " MHz");
}

} // namespace

double rx_sensitivity_for_rate(double phy_rate_mbps, double channel_bandwidth_mhz)
{
    const double factor = bandwidth_factor(channel_bandwidth_mhz);
    const double offset = factor == 1.0 ? 0.0 : (factor > 1.0 ? 3.0 : -3.0);
    return lookup_rate(phy_rate_mbps, channel_bandwidth_mhz).sensitivity_10mhz_dbm + offset;
}

double default_required_sinr_db(double phy_rate_mbps, double channel_bandwidth_mhz)
{
    return lookup_rate(phy_rate_mbps, channel_bandwidth_mhz).required_sinr_db;
}

PhyProfile phy_profile_for_rate(double phy_rate_mbps, double channel_bandwidth_mhz)
{
    return PhyProfile{phy_rate_mbps, rx_sensitivity_for_rate(phy_rate_mbps, channel_bandwidth_mhz),
                      default_required_sinr_db(phy_rate_mbps, channel_bandwidth_mhz), channel_bandwidth_mhz};
}

double PhyConfig::noise_floor_dbm() const
{
    return -174.0 + 10.0 * std::log10(channel_bandwidth_mhz * 1e6) + noise_figure_db;
}

double PhyConfig::required_sinr_for(double phy_rate_mbps) const
{
    for (const auto& [rate, sinr] : required_sinr_db)
        if (std::abs(rate - phy_rate_mbps) < 1e-9) return sinr;
    return default_required_sinr_db(phy_rate_mbps, channel_bandwidth_mhz);
}

void PhyConfig::validate() const
{
    bandwidth_factor(channel_bandwidth_mhz);
    if (!(noise_figure_db >= 0.0)) throw ConfigError("phy.noise_figure_db must be >= 0");
    for (const auto& [rate, sinr] : required_sinr_db) {
        lookup_rate(rate, channel_bandwidth_mhz);
        if (!std::isfinite(sinr)) throw ConfigError("phy.required_sinr_db entries must be finite");
    }
}

void MacParams::validate() const
{
    if (!(slot_s > 0.0)) throw ConfigError("mac.slot_us must be > 0");
    if (!(aifs_s > 0.0)) throw ConfigError("mac.aifs_us must be > 0");
}

double frame_airtime_s(std::uint32_t payload_bytes, double phy_rate_mbps, double channel_bandwidth_mhz)
{
    if (payload_bytes == 0) throw ConfigError("payload must be at least one byte");
    const double factor = bandwidth_factor(channel_bandwidth_mhz);
    const OfdmRate& rate = lookup_rate(phy_rate_mbps, channel_bandwidth_mhz);
    constexpr std::uint32_t kServiceBits = 16;
    constexpr std::uint32_t kTailBits = 6;
    const std::uint32_t bits = kServiceBits + 8 * payload_bytes + kTailBits;
    const std::uint32_t symbols = (bits + rate.data_bits_per_symbol - 1) / rate.data_bits_per_symbol;
    const double symbol_s = 8e-6 / factor;
    const double preamble_s = 32e-6 / factor;
    const double signal_s = 8e-6 / factor;
    return preamble_s + signal_s + symbols * symbol_s;
}

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::Delivered: return "delivered";
    case Verdict::BelowSensitivity: return "below_sensitivity";
    case Verdict::SinrFailure: return "sinr_failure";
    case Verdict::RxBusyTransmitting: return "rx_busy_transmitting";
    }
    return "unknown";
}

double sinr_db(double signal_mw, double noise_mw, double interference_mw)
{
    return 10.0 * std::log10(signal_mw / (noise_mw + interference_mw));
}

Verdict reception_decision(const ReceptionInput& in)
{
    if (in.rx_power_dbm < in.rx_sensitivity_dbm) return Verdict::BelowSensitivity;
    if (in.rx_transmitting) return Verdict::RxBusyTransmitting;
    const double signal_mw = std::pow(10.0, in.rx_power_dbm / 10.0);
    if (sinr_db(signal_mw, in.noise_mw, in.interference_mw) < in.required_sinr_db) return Verdict::SinrFailure;
    return Verdict::Delivered;
}

double cbr_update(CbrWindow& window, std::span<const BusyInterval> busy_intervals)
{
    const double lo = window.window_start_s;
    const double hi = window.window_start_s + window.window_length_s;
    std::vector<BusyInterval> clipped;
    clipped.reserve(busy_intervals.size());
    for (const auto& iv : busy_intervals) {
        const double s = std::max(iv.start_s, lo);
        const double e = std::min(iv.end_s, hi);
        if (e > s) clipped.push_back({s, e});
    }
    std::sort(clipped.begin(), clipped.end(),
              [](const BusyInterval& a, const BusyInterval& b) { return a.start_s < b.start_s; });
    double busy = 0.0;
    double cur_s = 0.0;
    double cur_e = -1.0;
    bool open = false;
    for (const auto& iv : clipped) {
        if (open && iv.start_s <= cur_e) {
            cur_e = std::max(cur_e, iv.end_s);
            continue;
        }
        if (open) busy += cur_e - cur_s;
        cur_s = iv.start_s;
        cur_e = iv.end_s;
        open = true;
    }
    if (open) busy += cur_e - cur_s;
    window.busy_time_accumulated_s = std::clamp(busy, 0.0, window.window_length_s);
    return window.cbr();
}

void BusyTracker::set_busy(double now_s)
{
    if (!busy_since_) busy_since_ = now_s;
}

void BusyTracker::set_idle(double now_s)
{
    if (!busy_since_) return;
    if (now_s > *busy_since_) {
        if (!closed_.empty() && closed_.back().end_s >= *busy_since_)
            closed_.back().end_s = now_s;
        else
            closed_.push_back({*busy_since_, now_s});
    }
    busy_since_.reset();
}

double BusyTracker::cbr_at(double now_s)
{
    const double lo = now_s - window_length_s_;
    while (!closed_.empty() && closed_.front().end_s <= lo) closed_.pop_front();
    double busy = 0.0;
    for (const auto& iv : closed_) {
        const double s = std::max(iv.start_s, lo);
        const double e = std::min(iv.end_s, now_s);
        if (e > s) busy += e - s;
    }
    if (busy_since_ && now_s > *busy_since_) busy += now_s - std::max(*busy_since_, lo);
    return std::clamp(busy / window_length_s_, 0.0, 1.0);
}

std::optional<double> CsmaState::request(double now_s, bool medium_busy, std::uint32_t drawn_slots)
{
    pending_ = true;
    drawn_slots_ = std::min(drawn_slots, mac_.contention_window);
    if (medium_busy) {
        backoff_active_ = true;
        slots_left_ = drawn_slots_;
        expiry_.reset();
    } else {
        backoff_active_ = false;
        slots_left_ = 0;
        idle_origin_s_ = now_s;
        expiry_ = now_s + mac_.aifs_s;
    }
    return expiry_;
}

void CsmaState::on_medium_busy(double now_s)
{
    if (!pending_ || !expiry_) return;
    if (*expiry_ <= now_s) return;
    if (!backoff_active_) {
        backoff_active_ = true;
        slots_left_ = drawn_slots_;
    } else {
        const double elapsed = now_s - idle_origin_s_ - mac_.aifs_s;
        if (elapsed > 0.0) {
            const auto consumed = static_cast<std::uint32_t>(std::floor(elapsed / mac_.slot_s + 1e-9));
            slots_left_ -= std::min(consumed, slots_left_);
        }
    }
    expiry_.reset();
}

std::optional<double> CsmaState::on_medium_idle(double now_s)
{
    if (!pending_ || expiry_) return expiry_;
    idle_origin_s_ = now_s;
    expiry_ = now_s + mac_.aifs_s + slots_left_ * mac_.slot_s;
    return expiry_;
}

bool CsmaState::fire(double now_s)
{
    if (!pending_ || !expiry_ || *expiry_ != now_s) return false;
    cancel();
    return true;
}

void CsmaState::cancel()
{
    pending_ = false;
    backoff_active_ = false;
    slots_left_ = 0;
    expiry_.reset();
}

double csma_schedule(double due_s, std::span<const BusyInterval> busy_intervals, std::uint32_t drawn_slots,
                     const MacParams& mac)
{
    const std::uint32_t drawn = std::min(drawn_slots, mac.contention_window);
    std::size_t i = 0;
    while (i < busy_intervals.size() && busy_intervals[i].end_s <= due_s) ++i;

    bool backoff = false;
    std::uint32_t slots = 0;
    double origin = due_s;
    if (i < busy_intervals.size() && busy_intervals[i].start_s <= due_s) {
        backoff = true;
        slots = drawn;
        origin = busy_intervals[i].end_s;
        ++i;
    }
    for (;;) {
        const double expiry = origin + mac.aifs_s + slots * mac.slot_s;
        while (i < busy_intervals.size() && busy_intervals[i].end_s <= origin) ++i;
        if (i == busy_intervals.size() || busy_intervals[i].start_s >= expiry) return expiry;
        const double busy_start = busy_intervals[i].start_s;
        if (!backoff) {
            backoff = true;
            slots = drawn;
        } else {
            const double elapsed = busy_start - origin - mac.aifs_s;
            if (elapsed > 0.0) {
                const auto consumed = static_cast<std::uint32_t>(std::floor(elapsed / mac.slot_s + 1e-9));
                slots -= std::min(consumed, slots);
            }
        }
        origin = busy_intervals[i].end_s;
        ++i;
    }
}

} // namespace dccsim
