// cfpos — positioning simulation library for cell-free massive MIMO
// Copyright (C) 2026 cfpos contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cfpos {

inline constexpr double kPi = std::numbers::pi;

/// Planar coordinate in meters.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double v) { return 10.0 * std::log10(v); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Thermal noise power over bandwidth_hz with the given receiver noise figure,
/// -174 dBm/Hz reference density. Returns watts.
inline double noise_power_watt(double bandwidth_hz, double noise_figure_db) {
    if (bandwidth_hz <= 0.0) {
        throw std::invalid_argument("noise_power_watt: bandwidth must be positive");
    }
    const double dbm = -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
    return dbm_to_watt(dbm);
}

}  // namespace cfpos
