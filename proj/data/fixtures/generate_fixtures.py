# Copyright 2026 The dccsim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the bundled field-log fixtures. Output is deterministic."""

import math
from pathlib import Path

import numpy as np

EARTH_RADIUS_M = 6371000.0
M_PER_DEG_LAT = EARTH_RADIUS_M * math.pi / 180.0
RSSI_OFFSET_DBM = -95
HERE = Path(__file__).resolve().parent

BASE_LAT = 37.5
BASE_LON = 127.0

# Received beacons out of 5000 per (tx power, distance bin).
PARKING_RECEIVED = {
    -10: [3840, 110, 0, 0],
    0: [5000, 5000, 5000, 4870],
    10: [5000, 5000, 5000, 5000],
    23: [5000, 5000, 5000, 5000],
}
PARKING_DISTANCES_M = [2.6, 5.1, 7.6, 10.1]
PARKING_BEACONS = 5000

# Distance where the mean received power crosses -77 dBm, per tx power.
HIGHWAY_CROSSOVER_M = {-10: 8.0, 10: 17.0, 16: 27.0}
HIGHWAY_BEACONS = 5000
HIGHWAY_RICIAN_K = 30.0
HIGHWAY_MIN_GAP_M = 3.0
HIGHWAY_MAX_GAP_M = 60.0
# Beacons per closing-and-opening sweep of the gap.
HIGHWAY_SWEEP_BEACONS = 1000


def tag(dbm):
    return f"m{-dbm}" if dbm < 0 else str(dbm)


def lat_north_of(lat, metres):
    return lat + metres / M_PER_DEG_LAT


def to_rssi(dbm):
    return int(min(60, max(0, round(dbm - RSSI_OFFSET_DBM))))


def write(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as f:
        f.write(header + "\n")
        f.writelines(rows)


def triangle(i, period, lo, hi):
    phase = (i % period) / period
    return lo + (hi - lo) * (1.0 - abs(2.0 * phase - 1.0))


def rician_gain(rng, k, n):
    los = math.sqrt(k / (k + 1.0))
    sigma = math.sqrt(1.0 / (2.0 * (k + 1.0)))
    re = los + sigma * rng.standard_normal(n)
    im = sigma * rng.standard_normal(n)
    return re * re + im * im


def parking_lot(rng):
    """Receiver parked at a fixed point, transmitter moved north between sessions."""
    for tx_dbm, received in PARKING_RECEIVED.items():
        tx_rows, rx_rows = [], []
        seq, t = 0, 0.0
        for dist, n_rx in zip(PARKING_DISTANCES_M, received):
            lat = lat_north_of(BASE_LAT, dist)
            keep = set(rng.choice(PARKING_BEACONS, size=n_rx, replace=False).tolist())
            mean_dbm = tx_dbm + 9.0 - (20 * math.log10(dist / 1000.0) + 20 * math.log10(5900) + 32.44)
            for i in range(PARKING_BEACONS):
                seq += 1
                t += 0.1
                tx_rows.append(f"{t:.3f},{seq},{lat:.8f},{BASE_LON:.8f}\n")
                if i in keep:
                    p = max(-77.0, mean_dbm + 2.0 * rng.standard_normal())
                    rx_rows.append(f"{t + 0.0004:.4f},{seq},{to_rssi(p)},{BASE_LAT:.8f},{BASE_LON:.8f}\n")
            t += 60.0
        d = HERE / "parking_lot" / f"tx_{tag(tx_dbm)}"
        write(d / "tx.csv", "time_s,seq,lat_deg,lon_deg", tx_rows)
        write(d / "rx.csv", "time_s,seq,rssi,lat_deg,lon_deg", rx_rows)


def highway(rng):
    """Two vehicles northbound at 20 m/s; the gap sweeps between 3 and 60 m and back."""
    speed = 20.0
    for tx_dbm, crossover in HIGHWAY_CROSSOVER_M.items():
        a_mw = 10 ** (-77 / 10.0) * crossover**2
        tx_rows, rx_rows = [], []
        for seq in range(1, HIGHWAY_BEACONS + 1):
            t = 0.1 * seq
            gap = triangle(seq, HIGHWAY_SWEEP_BEACONS, HIGHWAY_MIN_GAP_M, HIGHWAY_MAX_GAP_M)
            rx_north = speed * t
            tx_lat = lat_north_of(BASE_LAT, rx_north - gap)
            rx_lat = lat_north_of(BASE_LAT, rx_north)
            tx_rows.append(f"{t:.3f},{seq},{tx_lat:.8f},{BASE_LON:.8f}\n")
            p_mw = a_mw * gap**-2 * rician_gain(rng, HIGHWAY_RICIAN_K, 1)[0]
            p_dbm = 10 * math.log10(p_mw)
            if p_dbm >= -95.0:
                rx_rows.append(f"{t + 0.0004:.4f},{seq},{to_rssi(p_dbm)},{rx_lat:.8f},{BASE_LON:.8f}\n")
        d = HERE / "highway" / f"tx_{tag(tx_dbm)}"
        write(d / "tx.csv", "time_s,seq,lat_deg,lon_deg", tx_rows)
        write(d / "rx.csv", "time_s,seq,rssi,lat_deg,lon_deg", rx_rows)


def main():
    rng = np.random.default_rng(20260101)
    parking_lot(rng)
    highway(rng)


if __name__ == "__main__":
    main()
