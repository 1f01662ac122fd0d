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

#include "dccsim_cli/commands.hpp"

#include "dccsim/errors.hpp"
#include "dccsim/fieldlog.hpp"
#include "dccsim/metrics.hpp"
#include "dccsim/sweep.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

namespace dccsim::cli {

namespace fs = std::filesystem;

std::vector<Replication> run_replications(const SimConfig& base, std::uint32_t count, unsigned threads)
{
    std::vector<Replication> reps(count);
    std::vector<SimConfig> configs;
    configs.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        SimConfig c = base;
        c.seed = base.seed + i;
        c.scenario = rebuild(c.scenario, c.seed);
        reps[i].seed = c.seed;
        configs.push_back(std::move(c));
    }
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, std::max<std::uint32_t>(count, 1));

    std::atomic<std::uint32_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto worker = [&] {
        for (std::uint32_t i; (i = next.fetch_add(1)) < count;) {
            try {
                reps[i].output = run(configs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return reps;
}

namespace {

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write '" + path.string() + "'");
    f << text;
}

std::string read_file(const fs::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string transitions_csv(const RunOutput& out)
{
    std::ostringstream os;
    os << "time_s,vehicle_id,from,to\n";
    for (const auto& t : out.transitions)
        os << format_number(t.time_s) << ',' << t.vehicle_id << ',' << to_string(t.from) << ',' << to_string(t.to)
           << '\n';
    return os.str();
}

std::map<std::string, std::string> run_csvs(const RunOutput& out, const RunConfigFile& cfg)
{
    std::map<std::string, std::string> files;
    std::ostringstream cbr, link, pdr;
    write_cbr_timeseries_csv(cbr, out.cbr_samples);
    write_link_pdr_csv(link, link_stats(out.link_frames, cfg.sim.metric_interval_s));
    write_pdr_vs_distance_csv(pdr, pdr_vs_distance(out.link_frames, cfg.pdr_bin_width_m));
    files["cbr_timeseries.csv"] = cbr.str();
    files["link_pdr.csv"] = link.str();
    files["pdr_vs_distance.csv"] = pdr.str();
    files["transitions.csv"] = transitions_csv(out);
    return files;
}

/// Prefixes every row with the seed; the header gains a leading "seed" column.
void append_with_seed(std::string& merged, const std::string& csv, std::uint64_t seed)
{
    std::istringstream in(csv);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            if (merged.empty()) merged = "seed," + line + "\n";
            header = false;
            continue;
        }
        merged += std::to_string(seed) + "," + line + "\n";
    }
}

} // namespace

void write_run_directory(const fs::path& dir, const RunConfigFile& config, const std::vector<Replication>& reps)
{
    fs::create_directories(dir);
    RunConfigFile manifest = config;
    manifest.output_dir = dir.string();
    manifest.replications = static_cast<std::uint32_t>(reps.size());
    write_file(dir / "manifest.yaml", to_yaml(manifest));

    std::map<std::string, std::string> merged;
    for (const auto& r : reps) {
        const fs::path sub = dir / ("seed_" + std::to_string(r.seed));
        fs::create_directories(sub);
        for (const auto& [name, text] : run_csvs(r.output, config)) {
            write_file(sub / name, text);
            append_with_seed(merged[name], text, r.seed);
        }
    }
    for (const auto& [name, text] : merged) write_file(dir / name, text);
}

namespace {

struct LinkKey {
    VehicleId tx;
    VehicleId rx;
    auto operator<=>(const LinkKey&) const = default;
};

struct SweepRow {
    double value;
    std::optional<double> mean_cbr;
    std::map<LinkKey, std::pair<std::uint64_t, std::uint64_t>> links;
};

SweepRow summarize(double value, const RunConfigFile& cfg, const std::vector<Replication>& reps)
{
    SweepRow row{value, std::nullopt, {}};
    double cbr_sum = 0.0;
    int cbr_n = 0;
    for (const auto& r : reps) {
        try {
            cbr_sum += mean_ambient_cbr(r.output.cbr_samples, cfg.sim.discard_first_s);
            ++cbr_n;
        } catch (const DataError&) {
        }
        for (const auto& f : r.output.link_frames) {
            auto& [sent, delivered] = row.links[{f.tx_id, f.rx_id}];
            ++sent;
            if (f.verdict == Verdict::Delivered) ++delivered;
        }
    }
    if (cbr_n > 0) row.mean_cbr = cbr_sum / cbr_n;
    return row;
}

std::string sweep_summary_csv(const std::string& parameter, const std::vector<SweepRow>& rows)
{
    std::ostringstream os;
    os << parameter << ",mean_cbr,tx_id,rx_id,sent,delivered,pdr\n";
    for (const auto& r : rows) {
        const std::string head =
            format_number(r.value) + "," + (r.mean_cbr ? format_number(*r.mean_cbr) : std::string(kUndefinedMarker));
        if (r.links.empty()) {
            os << head << ",NA,NA,0,0,NA\n";
            continue;
        }
        for (const auto& [k, c] : r.links)
            os << head << ',' << k.tx << ',' << k.rx << ',' << c.first << ',' << c.second << ','
               << (c.first ? format_number(static_cast<double>(c.second) / static_cast<double>(c.first))
                           : std::string(kUndefinedMarker))
               << '\n';
    }
    return os.str();
}

std::vector<double> split_values(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
            throw CLI::ValidationError("--values", "not a number: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

RunConfigFile load_with_overrides(const std::string& path, const std::string& out_dir, std::uint32_t replications)
{
    RunConfigFile cfg = load_run_config(path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (replications > 0) cfg.replications = replications;
    return cfg;
}

int cmd_run(const std::string& path, const std::string& out_dir, std::uint32_t replications, unsigned threads,
            std::ostream& out, std::ostream& err)
{
    const RunConfigFile cfg = load_with_overrides(path, out_dir, replications);
    err << "running " << to_string(cfg.sim.scenario.kind) << " with " << cfg.sim.scenario.vehicles.size()
        << " vehicles, " << cfg.replications << " replication(s)\n";
    const auto reps = run_replications(cfg.sim, cfg.replications, threads);
    write_run_directory(cfg.output_dir, cfg, reps);
    out << "wrote " << cfg.output_dir << '\n';
    return kExitOk;
}

int cmd_sweep(const std::string& path, const std::string& out_dir, std::uint32_t replications, unsigned threads,
              const std::string& parameter, const std::optional<std::string>& values_text, std::ostream& out,
              std::ostream& err)
{
    RunConfigFile cfg = load_with_overrides(path, out_dir, replications);
    SweepDefinition def = cfg.sweep.value_or(SweepDefinition{});
    if (!parameter.empty()) {
        const auto p = parse_sweep_parameter(parameter);
        if (!p) throw ConfigError("unknown sweep parameter '" + parameter + "'");
        def.parameter = *p;
    }
    if (values_text) def.values = split_values(*values_text);
    if (def.values.empty()) {
        out << "no sweep values; nothing to do\n";
        return kExitOk;
    }
    cfg.sweep = def;

    const fs::path root = cfg.output_dir;
    fs::create_directories(root);
    write_file(root / "manifest.yaml", to_yaml(cfg));

    RunConfigFile base = cfg;
    base.sweep.reset();
    std::vector<SweepRow> rows;
    for (auto& [value, sim] : sweep(cfg.sim, def.parameter, def.values)) {
        RunConfigFile point = base;
        point.sim = sim;
        err << to_string(def.parameter) << " = " << format_number(value) << '\n';
        const auto reps = run_replications(point.sim, point.replications, threads);
        write_run_directory(root / (std::string(to_string(def.parameter)) + "_" + format_number(value)), point, reps);
        rows.push_back(summarize(value, point, reps));
    }
    write_file(root / "summary.csv", sweep_summary_csv(to_string(def.parameter), rows));
    out << "wrote " << (root / "summary.csv").string() << '\n';
    return kExitOk;
}

int cmd_link_budget(double tx, double gain, const std::vector<double>& sweep_gains, double sens, double freq,
                    double ht, double hr, const std::vector<double>& distances, double max_distance, double step,
                    const std::string& csv_path, std::ostream& out)
{
    RadioEnvironment env;
    env.frequency_mhz = freq;
    env.tx_antenna_height_m = ht;
    env.rx_antenna_height_m = hr;
    env.validate();
    const std::vector<double> gains = sweep_gains.empty() ? std::vector<double>{gain} : sweep_gains;

    std::vector<double> grid = distances;
    if (grid.empty()) {
        if (!(step > 0.0) || !(max_distance >= step)) throw ConfigError("need 0 < --step <= --max-distance");
        const auto n = static_cast<std::size_t>(std::floor(max_distance / step + 1e-9));
        for (std::size_t i = 1; i <= n; ++i) grid.push_back(step * static_cast<double>(i));
    }

    std::ostringstream table;
    table << "gain_dbi,distance_m,rx_power_dbm\n";
    for (double g : gains)
        for (double d : grid)
            table << format_number(g) << ',' << format_number(d) << ','
                  << format_number(rx_power_dbm(LinkBudget{tx, g, g, d}, env)) << '\n';

    out << "cross distance " << format_number(cross_distance_m(env)) << " m\n";
    for (double g : gains) {
        const double c = crossover_distance_m(tx, 2.0 * g, sens, env);
        out << "crossover tx " << format_number(tx) << " dBm gain " << format_number(g) << " dBi/end sens "
            << format_number(sens) << " dBm: " << (std::isfinite(c) ? format_number(c) + " m" : "none") << '\n';
    }
    if (csv_path.empty()) {
        out << table.str();
    } else {
        write_file(csv_path, table.str());
        out << "wrote " << csv_path << '\n';
    }
    return kExitOk;
}

void report(std::ostream& err, const char* what, const ParseDiagnostics& d)
{
    err << what << ": " << d.data_rows << " rows, " << d.accepted << " accepted, " << d.rejected << " rejected\n";
    for (const auto& m : d.messages) err << "  " << m << '\n';
}

int cmd_analyze_logs(const std::string& tx_path, const std::string& rx_path, double bin_width,
                     const std::vector<double>& anchor, double sens, const std::string& out_dir, std::ostream& out,
                     std::ostream& err)
{
    const auto tx = read_tx_log(tx_path);
    const auto rx = read_rx_log(rx_path);
    report(err, "tx log", tx.diagnostics);
    report(err, "rx log", rx.diagnostics);
    if (tx.diagnostics.accepted == 0 && rx.diagnostics.accepted == 0) {
        err << "error: no rows parsed\n";
        return kExitFailure;
    }
    TabulateOptions opt;
    opt.bin_width_m = bin_width;
    if (anchor.size() == 2) opt.receiver_anchor = GeoPoint{anchor[0], anchor[1]};
    const Tabulation tab = match_and_tabulate(tx.records, rx.records, opt);
    err << "matched " << tab.matched << " of " << tab.tx_count << " beacons; " << tab.unmatched_rx
        << " unmatched rx, " << tab.duplicate_rx << " duplicates\n";

    const fs::path dir = out_dir;
    fs::create_directories(dir);
    std::ostringstream pdr, table;
    write_pdr_vs_distance_csv(pdr, tab.bins);
    write_pdr_table_csv(table, tab.bins);
    write_file(dir / "pdr_vs_distance.csv", pdr.str());
    write_file(dir / "pdr_table.csv", table.str());
    try {
        const auto fit = fit_power_curve(tab.scatter, sens);
        std::ostringstream f;
        write_fit_csv(f, fit);
        write_file(dir / "fit.csv", f.str());
        out << "crossover at " << format_number(sens) << " dBm: "
            << (std::isfinite(fit.crossover_m) ? format_number(fit.crossover_m) + " m" : "none") << '\n';
    } catch (const DataError& e) {
        err << "warning: no fit: " << e.what() << '\n';
    }
    out << "wrote " << dir.string() << '\n';
    return kExitOk;
}

std::vector<PowerPoint> read_points(const std::string& path)
{
    std::istringstream in(read_file(path));
    std::string line;
    std::vector<PowerPoint> pts;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (n == 1) {
            if (line != "distance_m,rx_power_dbm")
                throw DataError(path + ": expected header 'distance_m,rx_power_dbm'");
            continue;
        }
        if (line.empty()) continue;
        const auto comma = line.find(',');
        try {
            if (comma == std::string::npos) throw std::invalid_argument("missing comma");
            pts.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
        } catch (const std::exception&) {
            throw DataError(path + ": line " + std::to_string(n) + ": malformed row");
        }
    }
    return pts;
}

int cmd_fit_curve(const std::string& input, double sens, const std::string& out_path, std::ostream& out)
{
    const auto fit = fit_power_curve(read_points(input), sens);
    std::ostringstream f;
    write_fit_csv(f, fit);
    if (out_path.empty()) {
        out << f.str();
    } else {
        write_file(out_path, f.str());
        out << "crossover at " << format_number(sens) << " dBm: "
            << (std::isfinite(fit.crossover_m) ? format_number(fit.crossover_m) + " m" : "none") << '\n';
    }
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"dccsim: DCC vehicular beaconing simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "dccsim 0.1.0");

    std::string config_path, out_dir, parameter;
    std::uint32_t replications = 0;
    unsigned threads = 0;

    auto* run = app.add_subcommand("run", "Run a scenario config");
    run->add_option("config", config_path, "YAML run configuration")->required();
    run->add_option("-o,--out", out_dir, "Output directory (overrides output_dir)");
    run->add_option("-n,--replications", replications, "Replication count (overrides the config)");
    run->add_option("-j,--threads", threads, "Worker threads (0 = hardware concurrency)");

    std::optional<std::string> values_text;
    auto* sw = app.add_subcommand("sweep", "Run one configuration per parameter value");
    sw->add_option("config", config_path, "YAML run configuration")->required();
    sw->add_option("-p,--parameter", parameter, "restrictive_tx_power | rx_sensitivity | distance | antenna_gain");
    sw->add_option("-v,--values", values_text, "Comma-separated values (overrides sweep.values)");
    sw->add_option("-o,--out", out_dir, "Output directory");
    sw->add_option("-n,--replications", replications, "Replications per value");
    sw->add_option("-j,--threads", threads, "Worker threads");

    double tx = 0.0, gain = 0.0, sens = -77.0, freq = 5900.0, ht = 1.5, hr = 1.5, max_d = 50.0, step = 0.5;
    std::vector<double> sweep_gains, distances;
    std::string csv_path;
    auto* lb = app.add_subcommand("link-budget", "Deterministic received power and crossover distance");
    lb->add_option("--tx", tx, "Transmit power (dBm)")->required();
    lb->add_option("--gain", gain, "Antenna gain per end (dBi)")->capture_default_str();
    lb->add_option("--sweep-gain", sweep_gains, "Several per-end gains, one curve each")->delimiter(',');
    lb->add_option("--sens", sens, "Rx sensitivity (dBm)")->capture_default_str();
    lb->add_option("--freq", freq, "Carrier (MHz)")->capture_default_str();
    lb->add_option("--ht", ht, "Tx antenna height (m)")->capture_default_str();
    lb->add_option("--hr", hr, "Rx antenna height (m)")->capture_default_str();
    lb->add_option("--distance", distances, "Distances to tabulate (m)")->delimiter(',');
    lb->add_option("--max-distance", max_d, "Grid end when --distance is absent (m)")->capture_default_str();
    lb->add_option("--step", step, "Grid step (m)")->capture_default_str();
    lb->add_option("--csv", csv_path, "Write the table here instead of standard output");

    std::string tx_log, rx_log, analysis_dir = ".";
    double bin_width = 2.5;
    std::vector<double> anchor;
    auto* al = app.add_subcommand("analyze-logs", "PDR table and power-curve fit from field logs");
    al->add_option("--tx", tx_log, "Transmitter log CSV")->required();
    al->add_option("--rx", rx_log, "Receiver log CSV")->required();
    al->add_option("--bin-width", bin_width, "Distance bin width (m)")->capture_default_str();
    al->add_option("--anchor", anchor, "Fixed receiver position lat,lon")->delimiter(',')->expected(2);
    al->add_option("--sens", sens, "Sensitivity for the crossover (dBm)")->capture_default_str();
    al->add_option("-o,--out", analysis_dir, "Output directory")->capture_default_str();

    std::string points_path, fit_out;
    auto* fc = app.add_subcommand("fit-curve", "Fit y = a d^b to (distance_m, rx_power_dbm) points");
    fc->add_option("input", points_path, "CSV with header distance_m,rx_power_dbm")->required();
    fc->add_option("--sens", sens, "Sensitivity for the crossover (dBm)")->capture_default_str();
    fc->add_option("-o,--out", fit_out, "Write fit.csv here instead of standard output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (*run) return cmd_run(config_path, out_dir, replications, threads, out, err);
        if (*sw) return cmd_sweep(config_path, out_dir, replications, threads, parameter, values_text, out, err);
        if (*lb)
            return cmd_link_budget(tx, gain, sweep_gains, sens, freq, ht, hr, distances, max_d, step, csv_path, out);
        if (*al) return cmd_analyze_logs(tx_log, rx_log, bin_width, anchor, sens, analysis_dir, out, err);
        if (*fc) return cmd_fit_curve(points_path, sens, fit_out, out);
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

} // namespace dccsim::cli
