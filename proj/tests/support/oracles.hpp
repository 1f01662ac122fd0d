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

// Reference formulas written independently of the library, for use as test oracles.

#pragma once

#include <cmath>
#include <numbers>

namespace oracle {

/// CDF of the unit-mean Rician power gain with factor k. G / s2 is noncentral chi-square
/// with 2 degrees of freedom and noncentrality 2k, where s2 = 1 / (2 (k + 1)). Evaluated as
/// a Poisson mixture of central chi-square CDFs with even degrees of freedom.
inline double rician_power_cdf(double g, double k)
{
    if (g <= 0.0) return 0.0;
    const double s2 = 1.0 / (2.0 * (k + 1.0));
    const double x = g / s2;      // chi-square variable
    const double half_lambda = k; // lambda / 2 = (2k) / 2
    double total = 0.0;
    double poisson = std::exp(-half_lambda);
    // P(chi2_{2(j+1)} <= x) = 1 - exp(-x/2) sum_{i=0}^{j} (x/2)^i / i!
    double term = std::exp(-x / 2.0);
    double partial = term;
    for (int j = 0; j < 400; ++j) {
        total += poisson * (1.0 - partial);
        poisson *= half_lambda / (j + 1);
        term *= (x / 2.0) / (j + 1);
        partial += term;
        if (poisson < 1e-18 && j > half_lambda) break;
    }
    return total;
}

/// Inverse of rician_power_cdf by bisection.
inline double rician_power_quantile(double p, double k)
{
    double lo = 0.0, hi = 50.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (rician_power_cdf(mid, k) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Friis free-space loss in dB with the 32.44 constant (d in m, f in MHz).
inline double fspl_db(double d_m, double f_mhz) { return 20.0 * std::log10(d_m / 1000.0) + 20.0 * std::log10(f_mhz) + 32.44; }

/// Distance where tx + 2 g - FSPL(d) = s, from the closed form of the free-space law.
inline double free_space_crossover_m(double tx_dbm, double gain_per_end_dbi, double s_dbm, double f_mhz)
{
    const double allowed = tx_dbm + 2.0 * gain_per_end_dbi - s_dbm - 20.0 * std::log10(f_mhz) - 32.44;
    return 1000.0 * std::pow(10.0, allowed / 20.0);
}

/// 4 pi h_t h_r / lambda with the exact speed of light.
inline double cross_distance_m(double ht, double hr, double f_mhz)
{
    const double lambda = 299792458.0 / (f_mhz * 1e6);
    return 4.0 * std::numbers::pi * ht * hr / lambda;
}

/// OFDM airtime at 10 MHz: 32 us preamble, 8 us SIGNAL, 8 us symbols of n_dbps bits.
inline double ofdm_airtime_10mhz_s(int payload_bytes, int n_dbps)
{
    const int bits = 16 + 8 * payload_bytes + 6;
    const int symbols = (bits + n_dbps - 1) / n_dbps;
    return 40e-6 + symbols * 8e-6;
}

} // namespace oracle
