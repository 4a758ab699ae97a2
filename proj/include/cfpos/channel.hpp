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

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "cfpos/rng.hpp"
#include "cfpos/scenario.hpp"

namespace cfpos {

using VectorXcd = Eigen::VectorXcd;

/// Uniform linear array response for arrival angle theta:
/// element n is exp(-j 2 pi n (spacing/wavelength) cos theta), n = 0..N-1.
VectorXcd steering_vector(double theta, int antennas, double spacing_ratio);

/// One small-scale realization of a link: channel vector plus the fading
/// coefficients it was built from (kept for closed-form checks).
struct ChannelDraw {
    VectorXcd h;                        // length N
    std::complex<double> phase;         // unit-modulus LoS phase shift
    std::vector<std::complex<double>> path_gains;  // one per scattering path
};

/// Rician channel vector: deterministic LoS ray scaled by kappa/(kappa+1)
/// plus paths_per_link scattered rays with standard complex normal gains.
/// Fresh phase and path gains every call; path angles come frozen from the
/// link state.
ChannelDraw draw_channel(const LinkState& link, int antennas, double spacing_ratio,
                         RandomStream& rng);

/// All M x K channel vectors of one coherence block.
struct ChannelRealization {
    int block_index = 0;
    std::vector<ChannelDraw> draws;  // row-major [ap * K + ue]

    const ChannelDraw& at(int ap, int ue, int ue_count) const {
        return draws[static_cast<std::size_t>(ap) * ue_count + ue];
    }
};

/// Draws the whole network for one block. Per-link substreams are derived
/// from (scenario seed, block index, ap, ue), so blocks are reproducible and
/// independent of evaluation order.
ChannelRealization draw_realization(const Scenario& scenario, int block_index);

}  // namespace cfpos
