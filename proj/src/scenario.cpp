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

#include "cfpos/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace cfpos {

void ScenarioConfig::validate() const {
    if (area_side <= 0.0) throw std::invalid_argument("scenario: area_side must be positive");
    if (ap_count < 1) throw std::invalid_argument("scenario: ap_count must be >= 1");
    if (ue_count < 1) throw std::invalid_argument("scenario: ue_count must be >= 1");
    if (antennas_per_ap < 1) throw std::invalid_argument("scenario: antennas_per_ap must be >= 1");
    if (paths_per_link < 1) throw std::invalid_argument("scenario: paths_per_link must be >= 1");
    if (tx_power_w <= 0.0) throw std::invalid_argument("scenario: tx_power_w must be positive");
    if (bandwidth_hz <= 0.0) throw std::invalid_argument("scenario: bandwidth_hz must be positive");
    if (height_gap < 0.0) throw std::invalid_argument("scenario: height_gap must be >= 0");
    if (effective_pilot_length() != ue_count) {
        throw std::invalid_argument("scenario: pilot_length must equal ue_count (orthogonal pilots)");
    }
    if (coherence_block < effective_pilot_length()) {
        throw std::invalid_argument("scenario: coherence_block shorter than pilot_length");
    }
    if (path_loss.inner_break_m <= 0.0 || path_loss.outer_break_m <= path_loss.inner_break_m) {
        throw std::invalid_argument("scenario: path loss breakpoints must satisfy 0 < d0 < d1");
    }
    if (spacing_ratio <= 0.0) throw std::invalid_argument("scenario: spacing_ratio must be positive");
}

double wrap_distance(Vec2 p, Vec2 q, double area_side, double height_gap) {
    auto axis = [area_side](double a, double b) {
        double d = std::fabs(a - b);
        return std::min(d, area_side - d);
    };
    const double dx = axis(p.x, q.x);
    const double dy = axis(p.y, q.y);
    return std::sqrt(dx * dx + dy * dy + height_gap * height_gap);
}

double path_loss_db(double distance_m, const PathLossParams& params) {
    if (distance_m <= 0.0) throw std::invalid_argument("path_loss: distance must be positive");
    const double d_km = distance_m / 1000.0;
    const double d0_km = params.inner_break_m / 1000.0;
    const double d1_km = params.outer_break_m / 1000.0;
    if (distance_m > params.outer_break_m) {
        return -params.fixed_loss_db - 35.0 * std::log10(d_km);
    }
    if (distance_m > params.inner_break_m) {
        return -params.fixed_loss_db - 15.0 * std::log10(d1_km) - 20.0 * std::log10(d_km);
    }
    return -params.fixed_loss_db - 15.0 * std::log10(d1_km) - 20.0 * std::log10(d0_km);
}

double path_loss(double distance_m, const PathLossParams& params) {
    return db_to_linear(path_loss_db(distance_m, params));
}

double rician_factor(double distance_m, bool line_of_sight) {
    if (distance_m < 0.0) throw std::invalid_argument("rician_factor: distance must be >= 0");
    if (!line_of_sight) return 0.0;
    return std::pow(10.0, 1.3 - 0.003 * distance_m);
}

double los_angle_between(Vec2 ap, Vec2 ue, double area_side) {
    auto axis = [area_side](double from, double to) {
        double d = to - from;
        if (d > area_side / 2.0) d -= area_side;
        if (d < -area_side / 2.0) d += area_side;
        return d;
    };
    const double dx = axis(ap.x, ue.x);
    const double dy = axis(ap.y, ue.y);
    if (dx == 0.0 && dy == 0.0) return kPi / 2.0;  // directly above: broadside
    return std::fabs(std::atan2(dy, dx));
}

std::uint64_t position_cell(Vec2 p, double cell_size) {
    const auto ix = static_cast<std::int64_t>(std::floor(p.x / cell_size));
    const auto iy = static_cast<std::int64_t>(std::floor(p.y / cell_size));
    return (static_cast<std::uint64_t>(ix) << 32) ^ static_cast<std::uint64_t>(iy & 0xFFFFFFFFll);
}

std::vector<double> derive_nlos_angles(std::uint64_t seed, int ap_index,
                                       std::uint64_t cell, int paths) {
    RandomStream stream =
        RandomStream(seed).substream(stream_tag::kNlosAngles, static_cast<std::uint64_t>(ap_index), cell);
    std::vector<double> angles(static_cast<std::size_t>(paths));
    for (auto& a : angles) a = stream.uniform(0.0, kPi);
    return angles;
}

bool is_line_of_sight(double distance_m, LosMode mode, double threshold_m) {
    switch (mode) {
        case LosMode::always_los: return true;
        case LosMode::always_nlos: return false;
        case LosMode::probabilistic: return distance_m <= threshold_m;
    }
    return false;
}

LinkState link_between(const ScenarioConfig& config, Vec2 ap, int ap_index, Vec2 position) {
    LinkState link;
    link.distance = wrap_distance(ap, position, config.area_side, config.height_gap);
    link.beta = path_loss(link.distance, config.path_loss);
    const bool los = is_line_of_sight(link.distance, config.los_mode, config.los_distance_threshold);
    link.kappa = rician_factor(link.distance, los);
    link.los_angle = los_angle_between(ap, position, config.area_side);
    link.nlos_angles = derive_nlos_angles(config.seed, ap_index, position_cell(position),
                                          config.paths_per_link);
    return link;
}

Scenario Scenario::build(const ScenarioConfig& config) {
    config.validate();
    Scenario s;
    s.config_ = config;
    s.noise_power_w_ = noise_power_watt(config.bandwidth_hz, config.noise_figure_db);

    RandomStream master(config.seed);
    RandomStream ap_stream = master.substream(stream_tag::kApPlacement);
    RandomStream ue_stream = master.substream(stream_tag::kUePlacement);
    s.placement_.ap_xy.resize(static_cast<std::size_t>(config.ap_count));
    for (auto& p : s.placement_.ap_xy) {
        p.x = ap_stream.uniform(0.0, config.area_side);
        p.y = ap_stream.uniform(0.0, config.area_side);
    }
    s.placement_.ue_xy.resize(static_cast<std::size_t>(config.ue_count));
    for (auto& p : s.placement_.ue_xy) {
        p.x = ue_stream.uniform(0.0, config.area_side);
        p.y = ue_stream.uniform(0.0, config.area_side);
    }
    s.rebuild_links();
    return s;
}

Scenario Scenario::from_parts(const ScenarioConfig& config, Placement placement) {
    config.validate();
    if (placement.ap_xy.size() != static_cast<std::size_t>(config.ap_count) ||
        placement.ue_xy.size() != static_cast<std::size_t>(config.ue_count)) {
        throw std::invalid_argument("scenario: placement sizes do not match config");
    }
    for (const auto& list : {placement.ap_xy, placement.ue_xy}) {
        for (const auto& p : list) {
            if (p.x < 0.0 || p.x > config.area_side || p.y < 0.0 || p.y > config.area_side) {
                throw std::invalid_argument("scenario: placement outside deployment area");
            }
        }
    }
    Scenario s;
    s.config_ = config;
    s.noise_power_w_ = noise_power_watt(config.bandwidth_hz, config.noise_figure_db);
    s.placement_ = std::move(placement);
    s.rebuild_links();
    return s;
}

void Scenario::rebuild_links() {
    links_.clear();
    links_.reserve(static_cast<std::size_t>(config_.ap_count) * config_.ue_count);
    for (int m = 0; m < config_.ap_count; ++m) {
        for (int k = 0; k < config_.ue_count; ++k) {
            links_.push_back(link_between(config_, placement_.ap_xy[m], m, placement_.ue_xy[k]));
        }
    }
}

Scenario Scenario::with_ue_positions(const std::vector<Vec2>& ue_xy) const {
    if (ue_xy.size() != static_cast<std::size_t>(config_.ue_count)) {
        throw std::invalid_argument("with_ue_positions: expected exactly ue_count positions");
    }
    for (const auto& p : ue_xy) {
        if (p.x < 0.0 || p.x > config_.area_side || p.y < 0.0 || p.y > config_.area_side) {
            throw std::invalid_argument("with_ue_positions: position outside deployment area");
        }
    }
    Scenario s;
    s.config_ = config_;
    s.noise_power_w_ = noise_power_w_;
    s.placement_.ap_xy = placement_.ap_xy;
    s.placement_.ue_xy = ue_xy;
    s.rebuild_links();
    return s;
}

}  // namespace cfpos
