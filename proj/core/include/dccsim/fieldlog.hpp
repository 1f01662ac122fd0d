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

#include "dccsim/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dccsim {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr int kRssiMin = 0;
inline constexpr int kRssiMax = 60;
inline constexpr double kRssiOffsetDbm = -95.0;

struct TxLogRecord {
    double time_s;
    std::uint32_t sequence_number;
    double lat_deg;
    double lon_deg;
};

struct RxLogRecord {
    double time_s;
    std::uint32_t sequence_number;
    int rssi;
    double lat_deg;
    double lon_deg;
};

struct GeoPoint {
    double lat_deg;
    double lon_deg;
};

/// Row-level outcome of reading one log file.
struct ParseDiagnostics {
    std::size_t data_rows = 0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    /// The first few rejection reasons, each prefixed with its line number.
    std::vector<std::string> messages;
};

template <typename Record>
struct LogFile {
    std::vector<Record> records;
    ParseDiagnostics diagnostics;
};

/// Header "time_s,seq,lat_deg,lon_deg". Rows with a non-increasing seq are rejected.
LogFile<TxLogRecord> read_tx_log(std::istream& in);
/// Header "time_s,seq,rssi,lat_deg,lon_deg". Rows with rssi outside [0, 60] are rejected.
LogFile<RxLogRecord> read_rx_log(std::istream& in);
/// Throw DataError if the file cannot be opened or the header is wrong.
LogFile<TxLogRecord> read_tx_log(const std::filesystem::path& path);
LogFile<RxLogRecord> read_rx_log(const std::filesystem::path& path);

/// Device units to dBm: rssi - 95. Throws DomainError outside [0, 60].
double rssi_to_dbm(int rssi);
/// Inverse on the integer grid; rounds to the nearest unit. Throws DomainError outside [-95, -35].
int dbm_to_rssi(double dbm);

bool valid_coordinates(double lat_deg, double lon_deg);

/// Great-circle distance on a sphere of radius 6371 km. Throws DomainError on invalid coordinates.
double haversine_m(double lat1_deg, double lon1_deg, double lat2_deg, double lon2_deg);

struct TabulateOptions {
    double bin_width_m = 2.5;
    /// Fixed receiver position. Without it the receiver track is interpolated from the rx log.
    std::optional<GeoPoint> receiver_anchor;
};

struct Tabulation {
    std::vector<PdrBin> bins;
    /// (distance, rx power) per matched beacon, ordered by sequence number.
    std::vector<PowerPoint> scatter;
    std::size_t tx_count = 0;
    std::size_t matched = 0;
    /// Rx sequence numbers with no tx record.
    std::size_t unmatched_rx = 0;
    /// Extra copies of an already matched sequence number.
    std::size_t duplicate_rx = 0;
};

/// Joins the two sides on sequence number and bins every sent beacon by link distance.
/// Matched beacons use the tx-reported position against the rx record's own position;
/// missed beacons use the receiver position at the tx time. Input order does not matter.
/// Throws DataError on an empty tx log, or when the receiver position is unknown.
Tabulation match_and_tabulate(std::span<const TxLogRecord> tx, std::span<const RxLogRecord> rx,
                              const TabulateOptions& options = {});

/// Table layout: bin_low_m,bin_high_m,sent,received,pdr_percent with one decimal.
void write_pdr_table_csv(std::ostream& os, std::span<const PdrBin> bins);

} // namespace dccsim
