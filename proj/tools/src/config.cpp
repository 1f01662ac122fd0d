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

#include "dccsim_cli/config.hpp"

#include "dccsim/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace dccsim::cli {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

/// Map reader that remembers which keys were consumed so leftovers can be reported.
class Section {
public:
    Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path))
    {
        if (node_ && !node_.IsNull() && !node_.IsMap())
            throw ConfigError(label() + " must be a mapping", line_of(node_));
    }

    bool has(const char* key) const { return node_.IsMap() && node_[key] && !node_[key].IsNull(); }

    YAML::Node take(const char* key)
    {
        if (!node_.IsMap()) return YAML::Node();
        seen_.insert(key);
        return node_[key];
    }

    template <typename T>
    void get(const char* key, T& out)
    {
        const YAML::Node n = take(key);
        if (!n || n.IsNull()) return;
        out = convert<T>(n, key);
    }

    template <typename T>
    void get(const char* key, std::optional<T>& out)
    {
        const YAML::Node n = take(key);
        if (!n) return;
        if (n.IsNull() || (n.IsScalar() && n.Scalar() == "none")) {
            out.reset();
            return;
        }
        out = convert<T>(n, key);
    }

    Section child(const char* key) { return Section(take(key), qualified(key)); }

    /// Throws on the first key that was never read.
    void finish() const
    {
        if (!node_.IsMap()) return;
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.count(key)) throw ConfigError("unknown key '" + qualified(key.c_str()) + "'", line_of(kv.first));
        }
    }

    std::string qualified(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
    std::string label() const { return path_.empty() ? "config" : path_; }
    const YAML::Node& node() const { return node_; }

    template <typename T>
    T convert(const YAML::Node& n, const char* key) const
    {
        if constexpr (std::is_same_v<T, DccState>) {
            const auto s = parse_dcc_state(scalar(n, key));
            if (!s) throw ConfigError(qualified(key) + ": unknown DCC state '" + n.Scalar() + "'", line_of(n));
            return *s;
        } else {
            scalar(n, key);
            try {
                return n.as<T>();
            } catch (const YAML::Exception&) {
                throw ConfigError(qualified(key) + ": cannot read '" + n.Scalar() + "'", line_of(n));
            }
        }
    }

private:
    const std::string& scalar(const YAML::Node& n, const char* key) const
    {
        if (!n.IsScalar()) throw ConfigError(qualified(key) + " must be a scalar", line_of(n));
        return n.Scalar();
    }

    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

const char* state_key(DccState s)
{
    switch (s) {
    case DccState::Relaxed: return "relaxed";
    case DccState::Active: return "active";
    case DccState::Restrictive: return "restrictive";
    }
    return "?";
}

void read_state_params(Section s, StateParams& p)
{
    s.get("tx_power_dbm", p.tx_power_dbm);
    s.get("cca_threshold_dbm", p.cca_threshold_dbm);
    s.get("beacon_rate_hz", p.beacon_rate_hz);
    s.get("phy_rate_mbps", p.phy_rate_mbps);
    s.get("rx_sensitivity_dbm", p.rx_sensitivity_dbm);
    s.finish();
}

void read_dcc(Section s, DccParamTable& t)
{
    for (auto st : {DccState::Relaxed, DccState::Active, DccState::Restrictive})
        read_state_params(s.child(state_key(st)), t[st]);
    s.get("min_cbr_threshold", t.min_cbr_threshold);
    s.get("max_cbr_threshold", t.max_cbr_threshold);
    s.get("up_dwell_s", t.up_dwell_s);
    s.get("down_dwell_s", t.down_dwell_s);
    std::optional<double> override_dbm;
    s.get("restrictive_tx_override_dbm", override_dbm);
    s.finish();
    try {
        t.validate();
        if (override_dbm) t = override_restrictive_tx(t, *override_dbm);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("dcc: ") + e.what(), line_of(s.node()));
    } catch (const DomainError& e) {
        throw ConfigError(std::string("dcc: ") + e.what(), line_of(s.node()));
    }
}

ScenarioSpec read_custom(Section& s)
{
    ScenarioSpec spec;
    const YAML::Node list = s.take("vehicles");
    if (!list || !list.IsSequence() || list.size() == 0)
        throw ConfigError("scenario.vehicles must be a non-empty list for kind custom", line_of(s.node()));
    for (std::size_t i = 0; i < list.size(); ++i) {
        Section v(list[i], "scenario.vehicles[" + std::to_string(i) + "]");
        VehiclePlacement p;
        if (!v.has("id")) throw ConfigError(v.label() + ": id is required", line_of(list[i]));
        v.get("id", p.id);
        v.get("x_m", p.x_m);
        v.get("y_m", p.y_m);
        v.get("vx_mps", p.vx_mps);
        v.get("vy_mps", p.vy_mps);
        v.get("antenna_gain_dbi", p.antenna_gain_dbi);
        v.get("initial_state", p.initial_state);
        v.get("pinned_state", p.pinned_state);
        v.get("tx_power_override_dbm", p.tx_power_override_dbm);
        v.get("rx_sensitivity_override_dbm", p.rx_sensitivity_override_dbm);
        v.get("beacons_enabled", p.beacons_enabled);
        v.finish();
        spec.vehicles.push_back(p);
    }
    const YAML::Node observed = s.take("observed");
    if (observed) {
        if (!observed.IsSequence()) throw ConfigError("scenario.observed must be a list", line_of(observed));
        for (const auto& id : observed) spec.observed.push_back(s.convert<VehicleId>(id, "observed"));
    }
    const YAML::Node roles = s.take("roles");
    if (roles) {
        if (!roles.IsMap()) throw ConfigError("scenario.roles must be a mapping", line_of(roles));
        for (const auto& kv : roles) spec.roles[kv.first.as<std::string>()] = s.convert<VehicleId>(kv.second, "roles");
    }
    return spec;
}

ScenarioSpec read_scenario(Section s, std::uint64_t seed)
{
    std::string kind_name = "stationary_pair";
    const YAML::Node kind_node = s.take("kind");
    if (kind_node && !kind_node.IsNull()) kind_name = s.convert<std::string>(kind_node, "kind");
    const auto kind = parse_scenario_kind(kind_name);
    if (!kind) throw ConfigError("scenario.kind: unknown kind '" + kind_name + "'", line_of(kind_node));

    ScenarioSpec spec;
    try {
        switch (*kind) {
        case ScenarioKind::StationaryPair: {
            StationaryPairParams p;
            s.get("distance_m", p.distance_m);
            s.get("tx_power_dbm", p.tx_power_dbm);
            s.get("antenna_gain_dbi", p.antenna_gain_dbi);
            s.get("rx_sensitivity_dbm", p.rx_sensitivity_dbm);
            s.get("beacons", p.beacons);
            s.finish();
            spec = build_stationary_pair(p);
            break;
        }
        case ScenarioKind::TwoWayMultiLane: {
            TwoWayMultiLaneParams p;
            s.get("congested_lanes", p.congested_lanes);
            s.get("vehicles_per_lane", p.vehicles_per_lane);
            s.get("vehicle_length_m", p.vehicle_length_m);
            s.get("gap_m", p.gap_m);
            s.get("lane_width_m", p.lane_width_m);
            s.get("median_m", p.median_m);
            s.get("free_lanes", p.free_lanes);
            s.get("free_lane_lead", p.free_lane_lead);
            s.get("free_lane_follow", p.free_lane_follow);
            s.get("free_separation_m", p.free_separation_m);
            s.get("speed_mps", p.speed_mps);
            s.get("antenna_gain_dbi", p.antenna_gain_dbi);
            s.get("transit_time_s", p.transit_time_s);
            s.finish();
            spec = build_two_way_multilane(p);
            break;
        }
        case ScenarioKind::SmoothFlow: {
            SmoothFlowParams p;
            s.get("lanes", p.lanes);
            s.get("vehicles_per_lane", p.vehicles_per_lane);
            s.get("road_length_m", p.road_length_m);
            s.get("gap_min_m", p.gap_min_m);
            s.get("gap_max_m", p.gap_max_m);
            s.get("speed_mps", p.speed_mps);
            s.get("antenna_gain_dbi", p.antenna_gain_dbi);
            s.get("observed_lane", p.observed_lane);
            s.get("observed_first_index", p.observed_first_index);
            s.get("pin_observed_gaps", p.pin_observed_gaps);
            s.get("observed_front_gap_m", p.observed_front_gap_m);
            s.get("observed_rear_gap_m", p.observed_rear_gap_m);
            s.get("fixed_gap_m", p.fixed_gap_m);
            s.finish();
            spec = build_smooth_flow(p, seed);
            break;
        }
        case ScenarioKind::PackedLanes: {
            PackedLanesParams p;
            s.get("lanes", p.lanes);
            s.get("vehicles_per_lane", p.vehicles_per_lane);
            s.get("vehicle_length_m", p.vehicle_length_m);
            s.get("gap_m", p.gap_m);
            s.get("lane_width_m", p.lane_width_m);
            s.get("antenna_gain_dbi", p.antenna_gain_dbi);
            s.get("pinned_state", p.pinned_state);
            s.finish();
            spec = build_packed_lanes(p);
            break;
        }
        case ScenarioKind::Custom:
            spec = read_custom(s);
            s.finish();
            break;
        }
    } catch (const ConfigError& e) {
        if (e.line() > 0) throw;
        throw ConfigError(std::string("scenario: ") + e.what(), line_of(s.node()));
    }
    return spec;
}

template <typename Fn>
void wrap(const YAML::Node& node, Fn&& fn)
{
    try {
        fn();
    } catch (const ConfigError& e) {
        if (e.line() > 0) throw;
        throw ConfigError(e.what(), line_of(node));
    }
}

} // namespace

std::string format_exact(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

RunConfigFile parse_run_config(std::string_view yaml_text)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::ParserException& e) {
        throw ConfigError("malformed YAML: " + e.msg, e.mark.line + 1);
    }
    Section top(root, "");
    RunConfigFile c;
    SimConfig& s = c.sim;

    top.get("seed", s.seed);
    top.get("replications", c.replications);
    top.get("output_dir", c.output_dir);
    top.get("pdr_bin_width_m", c.pdr_bin_width_m);
    const bool has_duration = top.has("duration_s");
    top.get("duration_s", s.duration_s);
    top.get("payload_bytes", s.payload_bytes);
    top.get("metric_interval_s", s.metric_interval_s);
    top.get("relevance_radius_m", s.relevance_radius_m);
    top.get("discard_first_s", s.discard_first_s);

    {
        Section cbr = top.child("cbr");
        cbr.get("period_s", s.cbr_period_s);
        cbr.get("window_s", s.cbr_window_s);
        cbr.finish();
    }
    {
        Section radio = top.child("radio");
        radio.get("frequency_mhz", s.env.frequency_mhz);
        radio.get("pathloss_exponent", s.env.pathloss_exponent);
        radio.get("tx_antenna_height_m", s.env.tx_antenna_height_m);
        radio.get("rx_antenna_height_m", s.env.rx_antenna_height_m);
        radio.get("rician_k", s.env.rician_k);
        radio.get("fading", s.env.fading_enabled);
        radio.finish();
        wrap(radio.node(), [&] { s.env.validate(); });
    }
    {
        Section phy = top.child("phy");
        phy.get("channel_bandwidth_mhz", s.phy.channel_bandwidth_mhz);
        phy.get("noise_figure_db", s.phy.noise_figure_db);
        const YAML::Node sinr = phy.take("required_sinr_db");
        if (sinr && !sinr.IsNull()) {
            if (!sinr.IsMap()) throw ConfigError("phy.required_sinr_db must map rate to dB", line_of(sinr));
            for (const auto& kv : sinr)
                s.phy.required_sinr_db[phy.convert<double>(kv.first, "required_sinr_db")] =
                    phy.convert<double>(kv.second, "required_sinr_db");
        }
        phy.finish();
        wrap(phy.node(), [&] { s.phy.validate(); });
    }
    {
        Section mac = top.child("mac");
        mac.get("slot_s", s.mac.slot_s);
        mac.get("aifs_s", s.mac.aifs_s);
        mac.get("contention_window", s.mac.contention_window);
        mac.finish();
        wrap(mac.node(), [&] { s.mac.validate(); });
    }
    read_dcc(top.child("dcc"), s.dcc_table);

    Section scen = top.child("scenario");
    s.scenario = read_scenario(scen, s.seed);
    if (!has_duration) {
        if (const auto* p = std::get_if<StationaryPairParams>(&s.scenario.params))
            s.duration_s = stationary_pair_duration_s(*p, s.dcc_table);
    }

    const YAML::Node sweep_node = top.take("sweep");
    if (sweep_node && !sweep_node.IsNull()) {
        Section sw(sweep_node, "sweep");
        SweepDefinition def;
        std::string name = to_string(def.parameter);
        const YAML::Node pn = sw.take("parameter");
        if (pn) name = sw.convert<std::string>(pn, "parameter");
        const auto p = parse_sweep_parameter(name);
        if (!p) throw ConfigError("sweep.parameter: unknown parameter '" + name + "'", line_of(pn ? pn : sweep_node));
        def.parameter = *p;
        const YAML::Node values = sw.take("values");
        if (values && !values.IsNull()) {
            if (!values.IsSequence()) throw ConfigError("sweep.values must be a list", line_of(values));
            for (const auto& v : values) def.values.push_back(sw.convert<double>(v, "values"));
        }
        sw.finish();
        c.sweep = def;
    }
    top.finish();

    if (c.replications == 0) throw ConfigError("replications must be >= 1", line_of(root["replications"]));
    if (!(c.pdr_bin_width_m > 0.0)) throw ConfigError("pdr_bin_width_m must be > 0", line_of(root["pdr_bin_width_m"]));
    wrap(root, [&] { s.validate(); });
    return c;
}

RunConfigFile load_run_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

namespace {

class YamlWriter {
public:
    void key(int indent, const std::string& k) { os_ << std::string(indent, ' ') << k << ":\n"; }
    void put(int indent, const std::string& k, const std::string& v)
    {
        os_ << std::string(indent, ' ') << k << ": " << v << "\n";
    }
    void put(int indent, const std::string& k, double v) { put(indent, k, format_exact(v)); }
    void put(int indent, const std::string& k, std::uint64_t v) { put(indent, k, std::to_string(v)); }
    void put(int indent, const std::string& k, std::uint32_t v) { put(indent, k, std::to_string(v)); }
    void put(int indent, const std::string& k, bool v) { put(indent, k, std::string(v ? "true" : "false")); }
    void put(int indent, const std::string& k, const std::optional<double>& v)
    {
        put(indent, k, v ? format_exact(*v) : std::string("none"));
    }
    void put(int indent, const std::string& k, const std::optional<DccState>& v)
    {
        put(indent, k, std::string(v ? to_string(*v) : "none"));
    }
    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
};

std::string quoted(const std::string& s)
{
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

void write_scenario(YamlWriter& w, const ScenarioSpec& spec)
{
    w.key(0, "scenario");
    w.put(2, "kind", std::string(to_string(spec.kind)));
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, StationaryPairParams>) {
                w.put(2, "distance_m", p.distance_m);
                w.put(2, "tx_power_dbm", p.tx_power_dbm);
                w.put(2, "antenna_gain_dbi", p.antenna_gain_dbi);
                w.put(2, "rx_sensitivity_dbm", p.rx_sensitivity_dbm);
                w.put(2, "beacons", p.beacons);
            } else if constexpr (std::is_same_v<P, TwoWayMultiLaneParams>) {
                w.put(2, "congested_lanes", p.congested_lanes);
                w.put(2, "vehicles_per_lane", p.vehicles_per_lane);
                w.put(2, "vehicle_length_m", p.vehicle_length_m);
                w.put(2, "gap_m", p.gap_m);
                w.put(2, "lane_width_m", p.lane_width_m);
                w.put(2, "median_m", p.median_m);
                w.put(2, "free_lanes", p.free_lanes);
                w.put(2, "free_lane_lead", p.free_lane_lead);
                w.put(2, "free_lane_follow", p.free_lane_follow);
                w.put(2, "free_separation_m", p.free_separation_m);
                w.put(2, "speed_mps", p.speed_mps);
                w.put(2, "antenna_gain_dbi", p.antenna_gain_dbi);
                w.put(2, "transit_time_s", p.transit_time_s);
            } else if constexpr (std::is_same_v<P, SmoothFlowParams>) {
                w.put(2, "lanes", p.lanes);
                w.put(2, "vehicles_per_lane", p.vehicles_per_lane);
                w.put(2, "road_length_m", p.road_length_m);
                w.put(2, "gap_min_m", p.gap_min_m);
                w.put(2, "gap_max_m", p.gap_max_m);
                w.put(2, "speed_mps", p.speed_mps);
                w.put(2, "antenna_gain_dbi", p.antenna_gain_dbi);
                w.put(2, "observed_lane", p.observed_lane);
                w.put(2, "observed_first_index", p.observed_first_index);
                w.put(2, "pin_observed_gaps", p.pin_observed_gaps);
                w.put(2, "observed_front_gap_m", p.observed_front_gap_m);
                w.put(2, "observed_rear_gap_m", p.observed_rear_gap_m);
                w.put(2, "fixed_gap_m", p.fixed_gap_m);
            } else if constexpr (std::is_same_v<P, PackedLanesParams>) {
                w.put(2, "lanes", p.lanes);
                w.put(2, "vehicles_per_lane", p.vehicles_per_lane);
                w.put(2, "vehicle_length_m", p.vehicle_length_m);
                w.put(2, "gap_m", p.gap_m);
                w.put(2, "lane_width_m", p.lane_width_m);
                w.put(2, "antenna_gain_dbi", p.antenna_gain_dbi);
                w.put(2, "pinned_state", p.pinned_state);
            } else {
                w.key(2, "vehicles");
                for (const auto& v : spec.vehicles) {
                    w.put(4, "- id", v.id);
                    w.put(6, "x_m", v.x_m);
                    w.put(6, "y_m", v.y_m);
                    w.put(6, "vx_mps", v.vx_mps);
                    w.put(6, "vy_mps", v.vy_mps);
                    w.put(6, "antenna_gain_dbi", v.antenna_gain_dbi);
                    w.put(6, "initial_state", std::string(to_string(v.initial_state)));
                    w.put(6, "pinned_state", v.pinned_state);
                    w.put(6, "tx_power_override_dbm", v.tx_power_override_dbm);
                    w.put(6, "rx_sensitivity_override_dbm", v.rx_sensitivity_override_dbm);
                    w.put(6, "beacons_enabled", v.beacons_enabled);
                }
                std::string ids;
                for (auto id : spec.observed) ids += (ids.empty() ? "" : ", ") + std::to_string(id);
                w.put(2, "observed", "[" + ids + "]");
                if (spec.roles.empty()) {
                    w.put(2, "roles", std::string("{}"));
                } else {
                    w.key(2, "roles");
                    for (const auto& [name, id] : spec.roles) w.put(4, quoted(name), id);
                }
            }
        },
        spec.params);
}

} // namespace

std::string to_yaml(const RunConfigFile& c)
{
    const SimConfig& s = c.sim;
    YamlWriter w;
    w.put(0, "seed", s.seed);
    w.put(0, "replications", c.replications);
    w.put(0, "output_dir", quoted(c.output_dir));
    w.put(0, "pdr_bin_width_m", c.pdr_bin_width_m);
    w.put(0, "duration_s", s.duration_s);
    w.put(0, "payload_bytes", s.payload_bytes);
    w.put(0, "metric_interval_s", s.metric_interval_s);
    w.put(0, "relevance_radius_m", s.relevance_radius_m);
    w.put(0, "discard_first_s", s.discard_first_s);
    w.key(0, "cbr");
    w.put(2, "period_s", s.cbr_period_s);
    w.put(2, "window_s", s.cbr_window_s);
    w.key(0, "radio");
    w.put(2, "frequency_mhz", s.env.frequency_mhz);
    w.put(2, "pathloss_exponent", s.env.pathloss_exponent);
    w.put(2, "tx_antenna_height_m", s.env.tx_antenna_height_m);
    w.put(2, "rx_antenna_height_m", s.env.rx_antenna_height_m);
    w.put(2, "rician_k", s.env.rician_k);
    w.put(2, "fading", s.env.fading_enabled);
    w.key(0, "phy");
    w.put(2, "channel_bandwidth_mhz", s.phy.channel_bandwidth_mhz);
    w.put(2, "noise_figure_db", s.phy.noise_figure_db);
    if (s.phy.required_sinr_db.empty()) {
        w.put(2, "required_sinr_db", std::string("{}"));
    } else {
        w.key(2, "required_sinr_db");
        for (const auto& [rate, db] : s.phy.required_sinr_db) w.put(4, format_exact(rate), db);
    }
    w.key(0, "mac");
    w.put(2, "slot_s", s.mac.slot_s);
    w.put(2, "aifs_s", s.mac.aifs_s);
    w.put(2, "contention_window", s.mac.contention_window);
    w.key(0, "dcc");
    for (auto st : {DccState::Relaxed, DccState::Active, DccState::Restrictive}) {
        const StateParams& p = s.dcc_table[st];
        w.key(2, state_key(st));
        w.put(4, "tx_power_dbm", p.tx_power_dbm);
        w.put(4, "cca_threshold_dbm", p.cca_threshold_dbm);
        w.put(4, "beacon_rate_hz", p.beacon_rate_hz);
        w.put(4, "phy_rate_mbps", p.phy_rate_mbps);
        w.put(4, "rx_sensitivity_dbm", p.rx_sensitivity_dbm);
    }
    w.put(2, "min_cbr_threshold", s.dcc_table.min_cbr_threshold);
    w.put(2, "max_cbr_threshold", s.dcc_table.max_cbr_threshold);
    w.put(2, "up_dwell_s", s.dcc_table.up_dwell_s);
    w.put(2, "down_dwell_s", s.dcc_table.down_dwell_s);
    write_scenario(w, s.scenario);
    if (c.sweep) {
        w.key(0, "sweep");
        w.put(2, "parameter", std::string(to_string(c.sweep->parameter)));
        std::string vals;
        for (double v : c.sweep->values) vals += (vals.empty() ? "" : ", ") + format_exact(v);
        w.put(2, "values", "[" + vals + "]");
    }
    return w.str();
}

} // namespace dccsim::cli
