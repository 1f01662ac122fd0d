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

#include "dccsim/metrics.hpp"

#include "dccsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

namespace dccsim {

std::optional<double> PdrBin::pdr() const
{
    if (sent == 0) return std::nullopt;
    return static_cast<double>(delivered) / static_cast<double>(sent);
}

std::vector<PdrBin> pdr_vs_distance(std::span<const DistanceOutcome> outcomes, double bin_width_m)
{
    if (!(bin_width_m > 0.0)) throw ContractViolation("bin width must be > 0");
    std::map<std::int64_t, PdrBin> bins;
    for (const auto& o : outcomes) {
        const auto k = static_cast<std::int64_t>(std::floor(o.distance_m / bin_width_m));
        auto& bin = bins.try_emplace(k, PdrBin{k * bin_width_m, (k + 1) * bin_width_m}).first->second;
        ++bin.sent;
        if (o.delivered) ++bin.delivered;
    }
    std::vector<PdrBin> out;
    if (bins.empty()) return out;
    const std::int64_t lo = bins.begin()->first;
    const std::int64_t hi = bins.rbegin()->first;
    for (std::int64_t k = lo; k <= hi; ++k) {
        const auto it = bins.find(k);
        out.push_back(it != bins.end() ? it->second : PdrBin{k * bin_width_m, (k + 1) * bin_width_m});
    }
    return out;
}

std::vector<PdrBin> pdr_vs_distance(std::span<const LinkFrameRecord> records, double bin_width_m)
{
    std::vector<DistanceOutcome> outcomes;
    outcomes.reserve(records.size());
    for (const auto& r : records) outcomes.push_back({r.distance_m, r.verdict == Verdict::Delivered});
    return pdr_vs_distance(outcomes, bin_width_m);
}

std::optional<double> LinkStats::pdr() const
{
    if (sent == 0) return std::nullopt;
    return static_cast<double>(delivered) / static_cast<double>(sent);
}

std::vector<LinkStats> link_stats(std::span<const LinkFrameRecord> records, double bucket_s)
{
    if (!(bucket_s > 0.0)) throw ContractViolation("bucket length must be > 0");
    std::map<std::tuple<VehicleId, VehicleId, std::int64_t>, std::pair<LinkStats, double>> acc;
    for (const auto& r : records) {
        const auto bucket = static_cast<std::int64_t>(std::floor(r.tx_start_s / bucket_s));
        auto& [stats, distance_sum] =
            acc.try_emplace({r.tx_id, r.rx_id, bucket}, LinkStats{r.tx_id, r.rx_id, bucket * bucket_s}, 0.0)
                .first->second;
        ++stats.sent;
        if (r.verdict == Verdict::Delivered) ++stats.delivered;
        ++stats.verdicts[static_cast<std::size_t>(r.verdict)];
        distance_sum += r.distance_m;
    }
    std::vector<LinkStats> out;
    out.reserve(acc.size());
    for (auto& [key, value] : acc) {
        value.first.mean_distance_m = value.second / value.first.sent;
        out.push_back(value.first);
    }
    return out;
}

std::optional<double> link_pdr(std::span<const LinkFrameRecord> records, VehicleId tx, VehicleId rx, double from_s)
{
    std::uint64_t sent = 0;
    std::uint64_t delivered = 0;
    for (const auto& r : records) {
        if (r.tx_id != tx || r.rx_id != rx || r.tx_start_s < from_s) continue;
        ++sent;
        if (r.verdict == Verdict::Delivered) ++delivered;
    }
    if (sent == 0) return std::nullopt;
    return static_cast<double>(delivered) / static_cast<double>(sent);
}

std::optional<double> mean_bucket_pdr(std::span<const LinkStats> stats, VehicleId tx, VehicleId rx, double from_s)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : stats) {
        if (s.tx_id != tx || s.rx_id != rx || s.time_bucket_s < from_s || s.sent == 0) continue;
        sum += *s.pdr();
        ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

double PowerCurveFit::power_mw(double distance_m) const { return a * std::pow(distance_m, b); }

double PowerCurveFit::power_dbm(double distance_m) const { return 10.0 * std::log10(power_mw(distance_m)); }

namespace {

double sum_squared_error(std::span<const double> d, std::span<const double> y, double a, double b)
{
    double sse = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double r = a * std::pow(d[i], b) - y[i];
        sse += r * r;
    }
    return sse;
}

} // namespace

PowerCurveFit fit_power_law(std::span<const double> distance_m, std::span<const double> power_mw)
{
    if (distance_m.size() != power_mw.size()) throw DataError("distance and power sample counts differ");
    if (distance_m.size() < 3) throw DataError("power curve fit needs at least 3 points");
    std::set<double> distinct;
    for (std::size_t i = 0; i < distance_m.size(); ++i) {
        if (!(distance_m[i] > 0.0) || !std::isfinite(distance_m[i]))
            throw DataError("power curve fit needs positive distances");
        if (!(power_mw[i] > 0.0) || !std::isfinite(power_mw[i]))
            throw DataError("power curve fit needs positive linear powers");
        distinct.insert(distance_m[i]);
    }
    if (distinct.size() < 2) throw DataError("power curve fit needs at least 2 distinct distances");

    const std::size_t n = distance_m.size();
    const double scale = *std::max_element(power_mw.begin(), power_mw.end());
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = power_mw[i] / scale;

    // Log-log regression for the starting point.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(distance_m[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double dn = static_cast<double>(n);
    double b = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
    double a = std::exp((sy - b * sx) / dn);

    // Levenberg-Marquardt on the two parameters.
    double sse = sum_squared_error(distance_m, y, a, b);
    double lambda = 1e-3;
    int it = 0;
    for (; it < 500 && lambda < 1e12; ++it) {
        double jaa = 0.0, jab = 0.0, jbb = 0.0, ga = 0.0, gb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = std::pow(distance_m[i], b);
            const double da = p;
            const double db = a * p * std::log(distance_m[i]);
            const double r = a * p - y[i];
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }
        const double m00 = jaa * (1.0 + lambda);
        const double m11 = jbb * (1.0 + lambda);
        const double det = m00 * m11 - jab * jab;
        if (!(std::abs(det) > 0.0)) break;
        const double step_a = -(m11 * ga - jab * gb) / det;
        const double step_b = -(m00 * gb - jab * ga) / det;
        const double trial_a = a + step_a;
        const double trial_b = b + step_b;
        const double trial_sse = trial_a > 0.0 ? sum_squared_error(distance_m, y, trial_a, trial_b)
                                               : std::numeric_limits<double>::infinity();
        if (trial_sse < sse) {
            const bool converged = std::abs(step_a) <= 1e-14 * std::abs(a) && std::abs(step_b) <= 1e-14 * std::abs(b) + 1e-15;
            const bool stalled = sse - trial_sse <= 1e-15 * sse;
            a = trial_a;
            b = trial_b;
            sse = trial_sse;
            lambda = std::max(lambda / 10.0, 1e-12);
            if (converged || stalled) break;
        } else {
            lambda *= 10.0;
        }
    }

    PowerCurveFit fit;
    fit.a = a * scale;
    fit.b = b;
    fit.sse = sse * scale * scale;
    fit.points = n;
    fit.iterations = it;
    fit.crossover_m = std::numeric_limits<double>::infinity();
    return fit;
}

PowerCurveFit fit_power_curve(std::span<const PowerPoint> points, double sensitivity_dbm)
{
    std::vector<double> d;
    std::vector<double> y;
    d.reserve(points.size());
    y.reserve(points.size());
    for (const auto& p : points) {
        d.push_back(p.distance_m);
        y.push_back(std::pow(10.0, p.rx_power_dbm / 10.0));
    }
    PowerCurveFit fit = fit_power_law(d, y);
    const double s_mw = std::pow(10.0, sensitivity_dbm / 10.0);
    if (fit.b < 0.0 && fit.a > 0.0) fit.crossover_m = std::pow(s_mw / fit.a, 1.0 / fit.b);
    return fit;
}

double mean_ambient_cbr(std::span<const CbrSample> samples, double discard_first_s)
{
    std::map<VehicleId, std::pair<double, std::size_t>> per_vehicle;
    for (const auto& s : samples) {
        if (s.time_s < discard_first_s) continue;
        auto& [sum, n] = per_vehicle[s.vehicle_id];
        sum += s.cbr;
        ++n;
    }
    if (per_vehicle.empty()) throw DataError("no CBR samples after the warm-up discard");
    double total = 0.0;
    for (const auto& [id, acc] : per_vehicle) total += acc.first / static_cast<double>(acc.second);
    return total / static_cast<double>(per_vehicle.size());
}

std::vector<CbrGroupSummary> ambient_cbr_summary(
    std::span<const std::pair<double, std::span<const CbrSample>>> groups, double discard_first_s)
{
    std::vector<CbrGroupSummary> out;
    out.reserve(groups.size());
    for (const auto& [value, samples] : groups) {
        std::set<VehicleId> vehicles;
        for (const auto& s : samples)
            if (s.time_s >= discard_first_s) vehicles.insert(s.vehicle_id);
        out.push_back({value, mean_ambient_cbr(samples, discard_first_s), vehicles.size()});
    }
    return out;
}

std::vector<StateInterval> state_timeline(std::span<const CbrSample> samples, VehicleId vehicle_id)
{
    std::vector<CbrSample> mine;
    for (const auto& s : samples)
        if (s.vehicle_id == vehicle_id) mine.push_back(s);
    std::stable_sort(mine.begin(), mine.end(), [](const CbrSample& a, const CbrSample& b) { return a.time_s < b.time_s; });

    std::vector<StateInterval> out;
    for (const auto& s : mine) {
        if (out.empty()) {
            out.push_back({s.state, s.time_s, s.time_s, true});
            continue;
        }
        StateInterval& last = out.back();
        if (s.state == last.state) {
            last.end_s = s.time_s;
        } else {
            last.end_s = s.time_s;
            last.open_ended = false;
            out.push_back({s.state, s.time_s, s.time_s, true});
        }
    }
    return out;
}

std::vector<StateInterval> co_state_intervals(std::span<const StateInterval> a, std::span<const StateInterval> b,
                                              DccState state)
{
    std::vector<StateInterval> out;
    for (const auto& x : a) {
        if (x.state != state) continue;
        for (const auto& y : b) {
            if (y.state != state) continue;
            const double s = std::max(x.start_s, y.start_s);
            const double e = std::min(x.end_s, y.end_s);
            if (e > s) out.push_back({state, s, e, x.open_ended && y.open_ended && e == x.end_s && e == y.end_s});
        }
    }
    std::sort(out.begin(), out.end(), [](const StateInterval& p, const StateInterval& q) { return p.start_s < q.start_s; });
    return out;
}

std::string format_number(double v)
{
    if (std::isnan(v)) return kUndefinedMarker;
    if (v == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

namespace {

std::string format_pdr(const std::optional<double>& pdr) { return pdr ? format_number(*pdr) : kUndefinedMarker; }

} // namespace

void write_pdr_vs_distance_csv(std::ostream& os, std::span<const PdrBin> bins)
{
    os << "bin_low_m,bin_high_m,sent,delivered,pdr\n";
    for (const auto& b : bins)
        os << format_number(b.bin_low_m) << ',' << format_number(b.bin_high_m) << ',' << b.sent << ','
           << b.delivered << ',' << format_pdr(b.pdr()) << '\n';
}

void write_cbr_timeseries_csv(std::ostream& os, std::span<const CbrSample> samples)
{
    os << "time_s,vehicle_id,cbr,state\n";
    for (const auto& s : samples)
        os << format_number(s.time_s) << ',' << s.vehicle_id << ',' << format_number(s.cbr) << ','
           << to_string(s.state) << '\n';
}

void write_link_pdr_csv(std::ostream& os, std::span<const LinkStats> stats)
{
    os << "time_s,tx_id,rx_id,distance_m,sent,delivered,pdr\n";
    for (const auto& s : stats)
        os << format_number(s.time_bucket_s) << ',' << s.tx_id << ',' << s.rx_id << ','
           << format_number(s.mean_distance_m) << ',' << s.sent << ',' << s.delivered << ',' << format_pdr(s.pdr())
           << '\n';
}

void write_fit_csv(std::ostream& os, const PowerCurveFit& fit)
{
    os << "a,b,sse,crossover_m\n";
    os << format_number(fit.a) << ',' << format_number(fit.b) << ',' << format_number(fit.sse) << ','
       << (std::isfinite(fit.crossover_m) ? format_number(fit.crossover_m) : std::string("inf")) << '\n';
}

} // namespace dccsim
