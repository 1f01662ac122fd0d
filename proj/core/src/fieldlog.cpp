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

#include "dccsim/fieldlog.hpp"

#include "dccsim/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <unordered_map>

namespace dccsim {

namespace {

constexpr std::size_t kMaxMessages = 20;

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string_view field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
        while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
        while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
        out.push_back(field);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
bool parse_field(std::string_view s, T& value)
{
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) return false;
    if constexpr (std::is_floating_point_v<T>) return std::isfinite(value);
    return true;
}

void reject(ParseDiagnostics& diag, std::size_t line_no, const std::string& why)
{
    ++diag.rejected;
    if (diag.messages.size() < kMaxMessages) diag.messages.push_back("line " + std::to_string(line_no) + ": " + why);
}

// Reads the header and then calls parse_row(fields, line_no, diag) for each nonblank line.
template <typename Record, typename RowParser>
LogFile<Record> read_log(std::istream& in, std::string_view expected_header, RowParser parse_row)
{
    LogFile<Record> log;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (!have_header) {
            std::string header;
            for (auto f : split_fields(line)) {
                if (!header.empty()) header += ',';
                header += f;
            }
            if (header != expected_header)
                throw DataError("line " + std::to_string(line_no) + ": expected header '" +
                                std::string(expected_header) + "', got '" + line + "'");
            have_header = true;
            continue;
        }
        ++log.diagnostics.data_rows;
        const auto fields = split_fields(line);
        if (auto rec = parse_row(fields, line_no, log.diagnostics)) {
            log.records.push_back(*rec);
            ++log.diagnostics.accepted;
        }
    }
    if (!have_header) throw DataError("log has no header row");
    return log;
}

template <typename Log>
Log open_and_read(const std::filesystem::path& path, Log (*reader)(std::istream&))
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return reader(in);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

} // namespace

LogFile<TxLogRecord> read_tx_log(std::istream& in)
{
    std::optional<std::uint32_t> last_seq;
    return read_log<TxLogRecord>(
        in, "time_s,seq,lat_deg,lon_deg",
        [&](const std::vector<std::string_view>& f, std::size_t line_no,
            ParseDiagnostics& diag) -> std::optional<TxLogRecord> {
            if (f.size() != 4) {
                reject(diag, line_no, "expected 4 fields, got " + std::to_string(f.size()));
                return std::nullopt;
            }
            TxLogRecord r{};
            if (!parse_field(f[0], r.time_s) || !parse_field(f[1], r.sequence_number) ||
                !parse_field(f[2], r.lat_deg) || !parse_field(f[3], r.lon_deg)) {
                reject(diag, line_no, "malformed number");
                return std::nullopt;
            }
            if (!valid_coordinates(r.lat_deg, r.lon_deg)) {
                reject(diag, line_no, "coordinates out of range");
                return std::nullopt;
            }
            if (last_seq && r.sequence_number <= *last_seq) {
                reject(diag, line_no, "sequence number " + std::to_string(r.sequence_number) + " not increasing");
                return std::nullopt;
            }
            last_seq = r.sequence_number;
            return r;
        });
}

LogFile<RxLogRecord> read_rx_log(std::istream& in)
{
    return read_log<RxLogRecord>(
        in, "time_s,seq,rssi,lat_deg,lon_deg",
        [](const std::vector<std::string_view>& f, std::size_t line_no,
           ParseDiagnostics& diag) -> std::optional<RxLogRecord> {
            if (f.size() != 5) {
                reject(diag, line_no, "expected 5 fields, got " + std::to_string(f.size()));
                return std::nullopt;
            }
            RxLogRecord r{};
            if (!parse_field(f[0], r.time_s) || !parse_field(f[1], r.sequence_number) ||
                !parse_field(f[2], r.rssi) || !parse_field(f[3], r.lat_deg) || !parse_field(f[4], r.lon_deg)) {
                reject(diag, line_no, "malformed number");
                return std::nullopt;
            }
            if (r.rssi < kRssiMin || r.rssi > kRssiMax) {
                reject(diag, line_no, "rssi " + std::to_string(r.rssi) + " outside [0, 60]");
                return std::nullopt;
            }
            if (!valid_coordinates(r.lat_deg, r.lon_deg)) {
                reject(diag, line_no, "coordinates out of range");
                return std::nullopt;
            }
            return r;
        });
}

LogFile<TxLogRecord> read_tx_log(const std::filesystem::path& path)
{
    return open_and_read<LogFile<TxLogRecord>>(path, &read_tx_log);
}

LogFile<RxLogRecord> read_rx_log(const std::filesystem::path& path)
{
    return open_and_read<LogFile<RxLogRecord>>(path, &read_rx_log);
}

double rssi_to_dbm(int rssi)
{
    if (rssi < kRssiMin || rssi > kRssiMax) throw DomainError("rssi outside [0, 60]: " + std::to_string(rssi));
    return static_cast<double>(rssi) + kRssiOffsetDbm;
}

int dbm_to_rssi(double dbm)
{
    const double units = std::round(dbm - kRssiOffsetDbm);
    if (!(units >= kRssiMin && units <= kRssiMax)) throw DomainError("power outside [-95, -35] dBm");
    return static_cast<int>(units);
}

bool valid_coordinates(double lat_deg, double lon_deg)
{
    return std::isfinite(lat_deg) && std::isfinite(lon_deg) && std::abs(lat_deg) <= 90.0 &&
           std::abs(lon_deg) <= 180.0;
}

double haversine_m(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg)
{
    if (!valid_coordinates(lat1_deg, lon1_deg) || !valid_coordinates(lat2_deg, lon2_deg))
        throw DomainError("invalid coordinates");
    constexpr double rad = std::numbers::pi / 180.0;
    const double phi1 = lat1_deg * rad;
    const double phi2 = lat2_deg * rad;
    const double dphi = (lat2_deg - lat1_deg) * rad;
    const double dlambda = (lon2_deg - lon1_deg) * rad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = std::clamp(s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2, 0.0, 1.0);
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

namespace {

// Receiver position at time t from a time-sorted track; clamped at both ends.
GeoPoint track_position(const std::vector<RxLogRecord>& track, double t)
{
    auto it = std::lower_bound(track.begin(), track.end(), t,
                               [](const RxLogRecord& r, double v) { return r.time_s < v; });
    if (it == track.begin()) return {it->lat_deg, it->lon_deg};
    if (it == track.end()) return {track.back().lat_deg, track.back().lon_deg};
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double span = hi.time_s - lo.time_s;
    const double w = span > 0.0 ? (t - lo.time_s) / span : 0.0;
    return {lo.lat_deg + w * (hi.lat_deg - lo.lat_deg), lo.lon_deg + w * (hi.lon_deg - lo.lon_deg)};
}

bool rx_order(const RxLogRecord& a, const RxLogRecord& b)
{
    return std::tie(a.time_s, a.sequence_number, a.rssi, a.lat_deg, a.lon_deg) <
           std::tie(b.time_s, b.sequence_number, b.rssi, b.lat_deg, b.lon_deg);
}

} // namespace

Tabulation match_and_tabulate(std::span<const TxLogRecord> tx, std::span<const RxLogRecord> rx,
                              const TabulateOptions& options)
{
    if (tx.empty()) throw DataError("empty tx log: PDR undefined");
    if (!(options.bin_width_m > 0.0)) throw ContractViolation("bin width must be > 0");
    if (!options.receiver_anchor && rx.empty())
        throw DataError("receiver position unknown: rx log is empty and no receiver anchor was given");

    std::vector<TxLogRecord> sent(tx.begin(), tx.end());
    std::sort(sent.begin(), sent.end(), [](const TxLogRecord& a, const TxLogRecord& b) {
        return std::tie(a.sequence_number, a.time_s, a.lat_deg, a.lon_deg) <
               std::tie(b.sequence_number, b.time_s, b.lat_deg, b.lon_deg);
    });
    for (std::size_t i = 1; i < sent.size(); ++i)
        if (sent[i].sequence_number == sent[i - 1].sequence_number)
            throw DataError("duplicate tx sequence number " + std::to_string(sent[i].sequence_number));

    std::vector<std::uint32_t> seqs;
    seqs.reserve(sent.size());
    for (const auto& t : sent) seqs.push_back(t.sequence_number);

    std::vector<RxLogRecord> track(rx.begin(), rx.end());
    std::sort(track.begin(), track.end(), rx_order);

    // The earliest copy of each sequence number is the delivery; later copies are duplicates.
    std::unordered_map<std::uint32_t, const RxLogRecord*> first_copy;
    Tabulation out;
    for (const auto& r : track) {
        const bool known = std::binary_search(seqs.begin(), seqs.end(), r.sequence_number);
        if (!known) {
            ++out.unmatched_rx;
            continue;
        }
        if (!first_copy.emplace(r.sequence_number, &r).second) ++out.duplicate_rx;
    }

    std::vector<DistanceOutcome> outcomes;
    outcomes.reserve(sent.size());
    for (const auto& t : sent) {
        const auto it = first_copy.find(t.sequence_number);
        if (it != first_copy.end()) {
            const RxLogRecord& r = *it->second;
            const double d = haversine_m(t.lat_deg, t.lon_deg, r.lat_deg, r.lon_deg);
            outcomes.push_back({d, true});
            out.scatter.push_back({d, rssi_to_dbm(r.rssi)});
        } else {
            const GeoPoint p = options.receiver_anchor ? *options.receiver_anchor : track_position(track, t.time_s);
            outcomes.push_back({haversine_m(t.lat_deg, t.lon_deg, p.lat_deg, p.lon_deg), false});
        }
    }
    out.tx_count = sent.size();
    out.matched = first_copy.size();
    out.bins = pdr_vs_distance(outcomes, options.bin_width_m);
    return out;
}

void write_pdr_table_csv(std::ostream& os, std::span<const PdrBin> bins)
{
    os << "bin_low_m,bin_high_m,sent,received,pdr_percent\n";
    for (const auto& b : bins) {
        os << format_number(b.bin_low_m) << ',' << format_number(b.bin_high_m) << ',' << b.sent << ','
           << b.delivered << ',';
        if (const auto pdr = b.pdr()) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.1f", 100.0 * *pdr);
            os << buf;
        } else {
            os << kUndefinedMarker;
        }
        os << '\n';
    }
}

} // namespace dccsim
