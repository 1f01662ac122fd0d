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

#include "dccsim/rng.hpp"

#include <cmath>

namespace dccsim {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Carrier and antenna geometry shared by every link in a run.
struct RadioEnvironment {
    double frequency_mhz = 5900.0;
    double pathloss_exponent = 2.0;
    double tx_antenna_height_m = 1.5;
    double rx_antenna_height_m = 1.5;
    double rician_k = 3.0; // linear LOS-to-scatter power ratio
    bool fading_enabled = true;

    double wavelength_m() const { return kSpeedOfLight / (frequency_mhz * 1e6); }

    /// Throws ConfigError on a violated invariant.
    void validate() const;
};

struct LinkBudget {
    double tx_power_dbm = 0.0;
    double tx_gain_dbi = 0.0;
    double rx_gain_dbi = 0.0;
    double distance_m = 1.0;
};

/// Free-space path loss, 20 log10(d_km) + 20 log10(f_MHz) + 32.44.
double fspl_db(double distance_m, double frequency_mhz);

/// Free-space loss with the configured exponent; identical to fspl_db when n = 2.
double free_space_pathloss_db(double distance_m, const RadioEnvironment& env);

/// Distance beyond which the two-ray ground model replaces free space: 4 pi h_t h_r / lambda.
double cross_distance_m(const RadioEnvironment& env);

/// Far-field two-ray ground loss, 40 log10(d) - 20 log10(h_t h_r). Only valid at or beyond
/// the cross distance; throws ContractViolation below it.
double two_ray_pathloss_db(double distance_m, const RadioEnvironment& env);

/// Active model: free space inside the cross distance, two-ray beyond it.
double pathloss_db(double distance_m, const RadioEnvironment& env);

/// Deterministic (non-faded) mean received power.
double rx_power_dbm(const LinkBudget& budget, const RadioEnvironment& env);

/// Distance at which the mean received power falls to the sensitivity. Returns +inf when
/// no crossover exists.
double crossover_distance_m(double tx_power_dbm, double total_gain_dbi, double rx_sensitivity_dbm,
                            const RadioEnvironment& env);

/// Precomputed linear path gain (1 / loss) of pathloss_db, evaluated from the squared distance.
class LinearPathGain {
public:
    explicit LinearPathGain(const RadioEnvironment& env);
    double operator()(double distance_sq_m2) const;

private:
    double cross_sq_;
    double free_space_const_;
    double two_ray_const_;
    double half_exponent_;
};

/// One Rician power-gain sample with unit mean. K = 0 is Rayleigh.
template <typename Urbg>
double rician_power_gain(double k, Urbg& rng)
{
    const auto [x, y] = normal_pair(rng);
    const double los = std::sqrt(k / (k + 1.0));
    const double sigma = std::sqrt(1.0 / (2.0 * (k + 1.0)));
    const double re = los + sigma * x;
    const double im = sigma * y;
    return re * re + im * im;
}

/// Block-fading gain for one (frame, receiver) pair; exactly 1 when fading is disabled.
template <typename Urbg>
double sample_fading_gain(const RadioEnvironment& env, Urbg& rng)
{
    if (!env.fading_enabled) return 1.0;
    return rician_power_gain(env.rician_k, rng);
}

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

} // namespace dccsim
