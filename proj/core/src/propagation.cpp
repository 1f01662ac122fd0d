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

#include "dccsim/propagation.hpp"

#include "dccsim/errors.hpp"

#include <limits>
#include <numbers>

namespace dccsim {

namespace {

// FSPL constant for distance in km and frequency in MHz.
constexpr double kFsplConstantDb = 32.44;

void require_positive(double value, const char* what)
{
    if (!(value > 0.0) || !std::isfinite(value))
        throw DomainError(std::string(what) + " must be positive and finite");
}

} // namespace

void RadioEnvironment::validate() const
{
    if (!(frequency_mhz > 0.0)) throw ConfigError("radio.frequency_mhz must be > 0");
    if (!(tx_antenna_height_m > 0.0) || !(rx_antenna_height_m > 0.0))
        throw ConfigError("radio antenna heights must be > 0");
    if (!(rician_k >= 0.0)) throw ConfigError("radio.rician_k must be >= 0");
    if (!(pathloss_exponent > 0.0)) throw ConfigError("radio.pathloss_exponent must be > 0");
}

double fspl_db(double distance_m, double frequency_mhz)
{
    require_positive(distance_m, "distance");
    require_positive(frequency_mhz, "frequency");
    return 20.0 * std::log10(distance_m / 1000.0) + 20.0 * std::log10(frequency_mhz) + kFsplConstantDb;
}

double free_space_pathloss_db(double distance_m, const RadioEnvironment& env)
{
    if (env.pathloss_exponent == 2.0) return fspl_db(distance_m, env.frequency_mhz);
    require_positive(distance_m, "distance");
    require_positive(env.frequency_mhz, "frequency");
    return 10.0 * env.pathloss_exponent * std::log10(distance_m / 1000.0) +
           20.0 * std::log10(env.frequency_mhz) + kFsplConstantDb;
}

double cross_distance_m(const RadioEnvironment& env)
{
    require_positive(env.tx_antenna_height_m, "tx antenna height");
    require_positive(env.rx_antenna_height_m, "rx antenna height");
    require_positive(env.frequency_mhz, "frequency");
    return 4.0 * std::numbers::pi * env.tx_antenna_height_m * env.rx_antenna_height_m / env.wavelength_m();
}

double two_ray_pathloss_db(double distance_m, const RadioEnvironment& env)
{
    require_positive(distance_m, "distance");
    const double dc = cross_distance_m(env);
    if (distance_m < dc * (1.0 - 1e-12))
        throw ContractViolation("two-ray model evaluated inside the cross distance");
    return 40.0 * std::log10(distance_m) -
           20.0 * std::log10(env.tx_antenna_height_m * env.rx_antenna_height_m);
}

double pathloss_db(double distance_m, const RadioEnvironment& env)
{
    require_positive(distance_m, "distance");
    if (distance_m < cross_distance_m(env)) return free_space_pathloss_db(distance_m, env);
    return two_ray_pathloss_db(distance_m, env);
}

double rx_power_dbm(const LinkBudget& budget, const RadioEnvironment& env)
{
    return budget.tx_power_dbm + budget.tx_gain_dbi + budget.rx_gain_dbi -
           pathloss_db(budget.distance_m, env);
}

LinearPathGain::LinearPathGain(const RadioEnvironment& env)
{
    env.validate();
    const double dc = cross_distance_m(env);
    cross_sq_ = dc * dc;
    // Loss with d in km: 10 n log10(d_km) + F  ->  gain = 10^(-F/10) * (d_m / 1000)^-n.
    const double f_term = 20.0 * std::log10(env.frequency_mhz) + kFsplConstantDb;
    free_space_const_ = std::pow(10.0, -f_term / 10.0) * std::pow(1000.0, env.pathloss_exponent);
    const double hh = env.tx_antenna_height_m * env.rx_antenna_height_m;
    two_ray_const_ = hh * hh;
    half_exponent_ = env.pathloss_exponent / 2.0;
}

double LinearPathGain::operator()(double distance_sq_m2) const
{
    if (distance_sq_m2 >= cross_sq_) return two_ray_const_ / (distance_sq_m2 * distance_sq_m2);
    if (half_exponent_ == 1.0) return free_space_const_ / distance_sq_m2;
    return free_space_const_ / std::pow(distance_sq_m2, half_exponent_);
}

double crossover_distance_m(double tx_power_dbm, double total_gain_dbi, double rx_sensitivity_dbm,
                            const RadioEnvironment& env)
{
    const double allowed_loss_db = tx_power_dbm + total_gain_dbi - rx_sensitivity_dbm;
    const double dc = cross_distance_m(env);

    // Invert the free-space branch first.
    const double f_term = 20.0 * std::log10(env.frequency_mhz) + kFsplConstantDb;
    const double d_fs_m = 1000.0 * std::pow(10.0, (allowed_loss_db - f_term) / (10.0 * env.pathloss_exponent));
    if (d_fs_m < dc) return d_fs_m;

    const double height_term = 20.0 * std::log10(env.tx_antenna_height_m * env.rx_antenna_height_m);
    const double d_tr_m = std::pow(10.0, (allowed_loss_db + height_term) / 40.0);
    if (!std::isfinite(d_tr_m)) return std::numeric_limits<double>::infinity();
    // Threshold lands inside the step at the switch point.
    return d_tr_m < dc ? dc : d_tr_m;
}

} // namespace dccsim
