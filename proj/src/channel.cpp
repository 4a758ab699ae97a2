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

#include "cfpos/channel.hpp"

#include <cmath>

namespace cfpos {

VectorXcd steering_vector(double theta, int antennas, double spacing_ratio) {
    if (antennas < 1) throw std::invalid_argument("steering_vector: antennas must be >= 1");
    VectorXcd a(antennas);
    const double step = -2.0 * kPi * spacing_ratio * std::cos(theta);
    for (int n = 0; n < antennas; ++n) {
        a(n) = std::polar(1.0, step * n);
    }
    return a;
}

ChannelDraw draw_channel(const LinkState& link, int antennas, double spacing_ratio,
                         RandomStream& rng) {
    ChannelDraw draw;
    const double mu = rng.uniform(0.0, 2.0 * kPi);
    draw.phase = std::polar(1.0, mu);
    draw.path_gains.resize(link.nlos_angles.size());
    for (auto& g : draw.path_gains) g = rng.complex_gaussian();

    const double kappa = link.kappa;
    const double beta = link.beta;
    const auto paths = static_cast<double>(link.nlos_angles.size());

    draw.h = VectorXcd::Zero(antennas);
    const double los_scale = std::sqrt(kappa * beta / (kappa + 1.0));
    if (los_scale > 0.0) {
        draw.h += los_scale * draw.phase * steering_vector(link.los_angle, antennas, spacing_ratio);
    }
    const double nlos_scale = std::sqrt(beta / (paths * (kappa + 1.0)));
    if (nlos_scale > 0.0) {
        for (std::size_t l = 0; l < link.nlos_angles.size(); ++l) {
            draw.h += nlos_scale * draw.path_gains[l] *
                      steering_vector(link.nlos_angles[l], antennas, spacing_ratio);
        }
    }
    return draw;
}

ChannelRealization draw_realization(const Scenario& scenario, int block_index) {
    const auto& cfg = scenario.config();
    ChannelRealization realization;
    realization.block_index = block_index;
    realization.draws.reserve(static_cast<std::size_t>(cfg.ap_count) * cfg.ue_count);
    RandomStream master(cfg.seed);
    for (int m = 0; m < cfg.ap_count; ++m) {
        for (int k = 0; k < cfg.ue_count; ++k) {
            RandomStream rng = master.substream(
                stream_tag::kChannelBlock, static_cast<std::uint64_t>(block_index),
                (static_cast<std::uint64_t>(m) << 32) | static_cast<std::uint64_t>(k));
            realization.draws.push_back(
                draw_channel(scenario.link(m, k), cfg.antennas_per_ap, cfg.spacing_ratio, rng));
        }
    }
    return realization;
}

}  // namespace cfpos
