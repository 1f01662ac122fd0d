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

#include "dccsim/engine.hpp"

#include "dccsim/errors.hpp"
#include "dccsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace dccsim {

VehicleState advance_mobility(const VehicleState& vehicle, double to_time_s)
{
    if (to_time_s < vehicle.position_time_s)
        throw ContractViolation("advance_mobility cannot move backwards in time");
    VehicleState out = vehicle;
    const double dt = to_time_s - vehicle.position_time_s;
    out.position.x += vehicle.velocity.x * dt;
    out.position.y += vehicle.velocity.y * dt;
    out.position_time_s = to_time_s;
    return out;
}

void SimConfig::validate() const
{
    if (!(duration_s > 0.0) || !std::isfinite(duration_s)) throw ConfigError("duration_s must be > 0");
    if (payload_bytes == 0) throw ConfigError("payload_bytes must be > 0");
    if (!(cbr_period_s > 0.0)) throw ConfigError("cbr.period_s must be > 0");
    if (!(cbr_window_s > 0.0)) throw ConfigError("cbr.window_s must be > 0");
    if (!(metric_interval_s >= cbr_period_s)) throw ConfigError("metric_interval_s must be >= cbr.period_s");
    const double ratio = metric_interval_s / cbr_period_s;
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
        throw ConfigError("metric_interval_s must be a whole multiple of cbr.period_s");
    if (!(relevance_radius_m > 0.0)) throw ConfigError("relevance_radius_m must be > 0");
    if (!(discard_first_s >= 0.0)) throw ConfigError("discard_first_s must be >= 0");
    env.validate();
    dcc_table.validate();
    phy.validate();
    mac.validate();
    for (const auto& p : dcc_table.params) frame_airtime_s(payload_bytes, p.phy_rate_mbps, phy.channel_bandwidth_mhz);
    if (scenario.vehicles.empty()) throw ConfigError("scenario has no vehicles");
    validate_geometry(scenario);
}

namespace {

enum class EventKind : std::uint8_t { TxEnd = 0, TxStart = 1, BeaconDue = 2, CbrTick = 3 };

struct Event {
    double time;
    EventKind kind;
    VehicleId vehicle;
    std::uint64_t order;
    std::uint32_t index;  // station index, or frame slot for TxEnd
    std::uint64_t token;  // staleness guard, or tick number for CbrTick
};

struct EventLater {
    bool operator()(const Event& a, const Event& b) const
    {
        return std::tie(a.time, a.kind, a.vehicle, a.order) > std::tie(b.time, b.kind, b.vehicle, b.order);
    }
};

struct Attempt {
    std::uint32_t rx;
    double power_mw;
    double distance_m;
    double interference_mw; // power already on the air at the frame start
    double started_mark_mw; // receiver's started-power counter just after this frame
    bool decoding;
    bool rx_transmitting;
    DccState rx_state;
};

struct Frame {
    std::uint32_t tx = 0;
    double start_s = 0.0;
    double end_s = 0.0;
    double required_sinr_lin = 1.0;
    std::uint32_t sequence = 0;
    DccState tx_state = DccState::Relaxed;
    std::vector<Attempt> attempts;
};

struct Station {
    VehiclePlacement placement;
    VehicleState state;
    std::optional<DccState> pinned;
    std::optional<double> tx_power_pin;
    std::optional<double> rx_sensitivity_override;
    bool observed = false;
    StateParams params{};
    double cca_mw = 0.0;
    double eirp_mw = 0.0;
    double sensitivity_mw = 0.0;
    double rx_gain_lin = 1.0;
    BusyTracker tracker;
    CsmaState csma;
    std::uint64_t csma_token = 0;
    std::uint64_t beacon_token = 0;
    std::optional<double> last_beacon_s;
    bool transmitting = false;
    bool busy = false;
    std::uint32_t decoding = 0;
    double aggregate_mw = 0.0;
    std::uint32_t ongoing = 0;
    // Running sum of every frame power that has started arriving; differences give the
    // energy of frames that began during an interval.
    double started_mw = 0.0;
    double last_tx_start_s = -1.0;
    VehicleCounters counters;

    Station(const VehiclePlacement& p, const SimConfig& cfg)
        : placement(p), tracker(cfg.cbr_window_s), csma(cfg.mac)
    {
        state.id = p.id;
        state.position = {p.x_m, p.y_m};
        state.velocity = {p.vx_mps, p.vy_mps};
        state.antenna_gain_dbi = p.antenna_gain_dbi;
        rx_gain_lin = dbm_to_mw(p.antenna_gain_dbi);
        state.dcc_timer.current = p.pinned_state.value_or(p.initial_state);
        pinned = p.pinned_state;
        tx_power_pin = p.tx_power_override_dbm;
        rx_sensitivity_override = p.rx_sensitivity_override_dbm;
        counters.id = p.id;
    }

    Vec2 position_at(double t) const { return {placement.x_m + placement.vx_mps * t, placement.y_m + placement.vy_mps * t}; }
};

} // namespace

struct Engine::Impl {
    SimConfig cfg;
    std::vector<Station> st;
    // Kept out of Station so the per-receiver loop stays cache friendly.
    std::vector<std::mt19937_64> backoff_rng;
    std::unordered_map<VehicleId, std::uint32_t> index_of;
    std::priority_queue<Event, std::vector<Event>, EventLater> events;
    std::uint64_t order = 0;
    double now = 0.0;
    std::vector<Frame> frames;
    std::vector<std::uint32_t> free_slots;
    RunOutput out;
    double noise_mw = 0.0;
    LinearPathGain path_gain;
    std::uint64_t ticks_per_metric = 5;
    bool finished = false;

    explicit Impl(SimConfig c) : cfg(validated(std::move(c))), path_gain(cfg.env)
    {
        noise_mw = dbm_to_mw(cfg.phy.noise_floor_dbm());
        ticks_per_metric = static_cast<std::uint64_t>(std::llround(cfg.metric_interval_s / cfg.cbr_period_s));
        out.duration_s = cfg.duration_s;

        std::unordered_set<VehicleId> observed(cfg.scenario.observed.begin(), cfg.scenario.observed.end());
        st.reserve(cfg.scenario.vehicles.size());
        for (const auto& p : cfg.scenario.vehicles) {
            index_of.emplace(p.id, static_cast<std::uint32_t>(st.size()));
            st.emplace_back(p, cfg);
            backoff_rng.push_back(make_stream(cfg.seed, p.id, StreamPurpose::Backoff));
            st.back().observed = observed.contains(p.id);
        }
        for (std::uint32_t i = 0; i < st.size(); ++i) {
            Station& s = st[i];
            refresh_params(s);
            if (s.placement.beacons_enabled) {
                auto phase_rng = make_stream(cfg.seed, s.state.id, StreamPurpose::Phase);
                const double due = uniform01(phase_rng) / s.params.beacon_rate_hz;
                schedule_beacon(i, due);
            }
        }
        push({cfg.cbr_period_s, EventKind::CbrTick, 0, 0, 0, 1});
    }

    static SimConfig validated(SimConfig c)
    {
        c.validate();
        return c;
    }

    void push(Event e)
    {
        e.order = order++;
        events.push(e);
    }

    std::uint32_t index(VehicleId id) const
    {
        const auto it = index_of.find(id);
        if (it == index_of.end()) throw ConfigError("unknown vehicle id " + std::to_string(id));
        return it->second;
    }

    StateParams effective_params(const Station& s) const
    {
        StateParams p = cfg.dcc_table[s.state.dcc_timer.current];
        if (s.tx_power_pin) p.tx_power_dbm = *s.tx_power_pin;
        if (s.rx_sensitivity_override) p.rx_sensitivity_dbm = *s.rx_sensitivity_override;
        return p;
    }

    void refresh_params(Station& s)
    {
        s.params = effective_params(s);
        s.cca_mw = dbm_to_mw(s.params.cca_threshold_dbm);
        s.eirp_mw = dbm_to_mw(s.params.tx_power_dbm + s.placement.antenna_gain_dbi);
        s.sensitivity_mw = dbm_to_mw(s.params.rx_sensitivity_dbm);
    }

    void schedule_beacon(std::uint32_t i, double due)
    {
        Station& s = st[i];
        s.state.next_beacon_due_s = due;
        ++s.beacon_token;
        if (due < cfg.duration_s) push({due, EventKind::BeaconDue, s.state.id, 0, i, s.beacon_token});
    }

    void schedule_tx(std::uint32_t i, double at)
    {
        Station& s = st[i];
        ++s.csma_token;
        push({at, EventKind::TxStart, s.state.id, 0, i, s.csma_token});
    }

    void update_busy(std::uint32_t i)
    {
        Station& s = st[i];
        const bool b = s.transmitting || s.decoding > 0 || s.aggregate_mw >= s.cca_mw;
        if (b == s.busy) return;
        s.busy = b;
        if (b) {
            s.tracker.set_busy(now);
            s.csma.on_medium_busy(now);
        } else {
            s.tracker.set_idle(now);
            const bool had = s.csma.expiry().has_value();
            const auto expiry = s.csma.on_medium_idle(now);
            if (expiry && !had) schedule_tx(i, *expiry);
        }
    }

    void on_state_change(std::uint32_t i, DccState from)
    {
        Station& s = st[i];
        const double old_rate = s.params.beacon_rate_hz;
        refresh_params(s);
        update_busy(i);
        out.transitions.push_back({now, s.state.id, from, s.state.dcc_timer.current});
        if (!s.placement.beacons_enabled || s.params.beacon_rate_hz == old_rate) return;
        // Keep the vehicle's beacon phase: the first slot of the new cadence at or after now.
        // Snapping overdue beacons to `now` would synchronize every vehicle that switches on the same tick.
        const double interval = 1.0 / s.params.beacon_rate_hz;
        double next = std::min(s.state.next_beacon_due_s, now + interval);
        if (s.last_beacon_s) {
            const double steps = std::max(1.0, std::ceil((now - *s.last_beacon_s) / interval - 1e-9));
            next = *s.last_beacon_s + steps * interval;
        }
        schedule_beacon(i, next);
    }

    void handle_beacon(const Event& e)
    {
        Station& s = st[e.index];
        if (e.token != s.beacon_token) return;
        if (s.csma.pending()) {
            s.csma.cancel();
            ++s.counters.beacons_dropped;
        }
        ++s.state.beacon_sequence;
        ++s.counters.beacons_generated;
        s.last_beacon_s = now;
        const std::uint32_t drawn = uniform_int_inclusive(backoff_rng[e.index], cfg.mac.contention_window);
        if (const auto expiry = s.csma.request(now, s.busy, drawn)) schedule_tx(e.index, *expiry);
        schedule_beacon(e.index, now + 1.0 / s.params.beacon_rate_hz);
    }

    std::uint32_t allocate_frame()
    {
        if (!free_slots.empty()) {
            const std::uint32_t slot = free_slots.back();
            free_slots.pop_back();
            return slot;
        }
        frames.emplace_back();
        return static_cast<std::uint32_t>(frames.size() - 1);
    }

    void handle_tx_start(const Event& e)
    {
        const std::uint32_t ti = e.index;
        Station& tx = st[ti];
        if (e.token != tx.csma_token || !tx.csma.fire(now)) return;
        if (now >= cfg.duration_s) {
            ++tx.counters.beacons_dropped;
            return;
        }

        const std::uint32_t slot = allocate_frame();
        Frame& f = frames[slot];
        f.tx = ti;
        f.start_s = now;
        f.end_s = now + frame_airtime_s(cfg.payload_bytes, tx.params.phy_rate_mbps, cfg.phy.channel_bandwidth_mhz);
        f.required_sinr_lin = dbm_to_mw(cfg.phy.required_sinr_for(tx.params.phy_rate_mbps));
        f.sequence = tx.state.beacon_sequence;
        f.tx_state = tx.state.dcc_timer.current;
        f.attempts.clear();

        ++tx.counters.frames_sent;
        tx.transmitting = true;
        tx.last_tx_start_s = now;
        update_busy(ti);

        const Vec2 tx_pos = tx.position_at(now);
        const double radius2 = cfg.relevance_radius_m * cfg.relevance_radius_m;
        const VehicleId tx_id = tx.state.id;
        for (std::uint32_t ri = 0; ri < st.size(); ++ri) {
            if (ri == ti) continue;
            Station& rx = st[ri];
            const Vec2 rx_pos = rx.position_at(now);
            const double dx = rx_pos.x - tx_pos.x;
            const double dy = rx_pos.y - tx_pos.y;
            const double d2 = dx * dx + dy * dy;
            if (d2 > radius2) continue;
            const double d2c = std::max(d2, 1e-6);
            const double mean_mw = tx.eirp_mw * rx.rx_gain_lin * path_gain(d2c);
            SplitMix64 fading_rng(stream_key(cfg.seed, static_cast<std::uint64_t>(StreamPurpose::Fading), tx_id,
                                             rx.state.id, f.sequence));
            const double gain = sample_fading_gain(cfg.env, fading_rng);
            const double p_mw = mean_mw * gain;

            rx.started_mw += p_mw;
            Attempt a{ri, p_mw, std::sqrt(d2c), rx.aggregate_mw, rx.started_mw, p_mw >= rx.sensitivity_mw,
                      rx.transmitting, rx.state.dcc_timer.current};
            rx.aggregate_mw += p_mw;
            if (a.decoding) ++rx.decoding;
            ++rx.ongoing;
            f.attempts.push_back(a);
            update_busy(ri);
        }
        push({f.end_s, EventKind::TxEnd, tx_id, 0, slot, 0});
    }

    void handle_tx_end(const Event& e)
    {
        const std::uint32_t slot = e.index;
        Frame& f = frames[slot];
        Station& tx = st[f.tx];
        for (std::uint32_t ai = 0; ai < f.attempts.size(); ++ai) {
            const Attempt& a = f.attempts[ai];
            Station& rx = st[a.rx];
            // Interference is every frame overlapping this one: those on the air at its start plus
            // those that started before its end (TxEnd sorts ahead of TxStart at equal times).
            const double interference_mw = a.interference_mw + std::max(0.0, rx.started_mw - a.started_mark_mw);
            const bool rx_transmitting = a.rx_transmitting || rx.last_tx_start_s >= f.start_s;
            // Same ordering as reception_decision, evaluated in the linear domain.
            Verdict v = Verdict::Delivered;
            if (!a.decoding) v = Verdict::BelowSensitivity;
            else if (rx_transmitting) v = Verdict::RxBusyTransmitting;
            else if (a.power_mw < f.required_sinr_lin * (noise_mw + interference_mw)) v = Verdict::SinrFailure;
            ++out.totals.reception_attempts;
            ++out.totals.verdicts[static_cast<std::size_t>(v)];

            --rx.ongoing;
            rx.aggregate_mw -= a.power_mw;
            if (rx.ongoing == 0 || rx.aggregate_mw < 0.0) rx.aggregate_mw = 0.0;
            if (a.decoding) --rx.decoding;

            if (tx.observed && rx.observed)
                out.link_frames.push_back({f.start_s, tx.state.id, rx.state.id, f.sequence, a.distance_m,
                                           mw_to_dbm(a.power_mw), v, f.tx_state, a.rx_state});
            update_busy(a.rx);
        }
        tx.transmitting = false;
        update_busy(f.tx);
        f.attempts.clear();
        free_slots.push_back(slot);
    }

    void handle_cbr_tick(const Event& e)
    {
        const std::uint64_t k = e.token;
        const bool metric_tick = k % ticks_per_metric == 0;
        for (std::uint32_t i = 0; i < st.size(); ++i) {
            Station& s = st[i];
            const double cbr = s.tracker.cbr_at(now);
            if (!s.pinned) {
                const DccState before = s.state.dcc_timer.current;
                const auto res = dcc_step(s.state.dcc_timer, cbr, now, cfg.dcc_table);
                if (res.changed) on_state_change(i, before);
            }
            if (s.observed || metric_tick)
                out.cbr_samples.push_back({now, s.state.id, cbr, s.state.dcc_timer.current});
        }
        const double next = static_cast<double>(k + 1) * cfg.cbr_period_s;
        if (next <= cfg.duration_s + 1e-9) push({next, EventKind::CbrTick, 0, 0, 0, k + 1});
    }

    void dispatch(const Event& e)
    {
        now = e.time;
        switch (e.kind) {
        case EventKind::TxEnd: handle_tx_end(e); break;
        case EventKind::TxStart: handle_tx_start(e); break;
        case EventKind::BeaconDue: handle_beacon(e); break;
        case EventKind::CbrTick: handle_cbr_tick(e); break;
        }
    }

    void run_until(double t)
    {
        const double bound = std::min(t, cfg.duration_s + 1e-9);
        while (!events.empty() && events.top().time <= bound) {
            const Event e = events.top();
            events.pop();
            dispatch(e);
        }
        if (t > now) now = std::min(t, cfg.duration_s);
    }

    RunOutput finish()
    {
        if (finished) throw ContractViolation("Engine::finish called twice");
        run_until(cfg.duration_s);
        // Frames already on the air complete; nothing new starts.
        while (!events.empty()) {
            const Event e = events.top();
            events.pop();
            if (e.kind == EventKind::TxEnd) dispatch(e);
            else if (e.kind == EventKind::TxStart && e.token == st[e.index].csma_token && st[e.index].csma.pending()) {
                st[e.index].csma.cancel();
                ++st[e.index].counters.beacons_dropped;
            }
        }
        for (auto& s : st) {
            if (s.csma.pending()) {
                s.csma.cancel();
                ++s.counters.beacons_dropped;
            }
            out.totals.beacons_generated += s.counters.beacons_generated;
            out.totals.frames_sent += s.counters.frames_sent;
            out.totals.beacons_dropped += s.counters.beacons_dropped;
            out.vehicles.push_back(s.counters);
        }
        finished = true;
        return std::move(out);
    }
};

Engine::Engine(SimConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

void Engine::force_state(VehicleId id, DccState state)
{
    const std::uint32_t i = impl_->index(id);
    Station& s = impl_->st[i];
    s.pinned = state;
    const DccState before = s.state.dcc_timer.current;
    if (before == state) return;
    s.state.dcc_timer = DccTimerState{state, std::nullopt, std::nullopt, impl_->now};
    impl_->on_state_change(i, before);
}

void Engine::pin_tx_power(VehicleId id, double tx_power_dbm)
{
    Station& s = impl_->st[impl_->index(id)];
    s.tx_power_pin = tx_power_dbm;
    impl_->refresh_params(s);
}

void Engine::unpin(VehicleId id)
{
    Station& s = impl_->st[impl_->index(id)];
    s.pinned.reset();
    s.tx_power_pin.reset();
    impl_->refresh_params(s);
}

void Engine::run_until(double t_s)
{
    if (impl_->finished) throw ContractViolation("engine already finished");
    impl_->run_until(t_s);
}

RunOutput Engine::finish() { return impl_->finish(); }

double Engine::now() const { return impl_->now; }

VehicleState Engine::vehicle(VehicleId id) const
{
    const Station& s = impl_->st[impl_->index(id)];
    VehicleState v = s.state;
    v.position = s.position_at(impl_->now);
    v.position_time_s = impl_->now;
    return v;
}

DccState Engine::state_of(VehicleId id) const { return impl_->st[impl_->index(id)].state.dcc_timer.current; }

RunOutput run(const SimConfig& config) { return Engine(config).finish(); }

} // namespace dccsim
