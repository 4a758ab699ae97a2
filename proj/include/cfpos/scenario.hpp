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

#include <cstdint>
#include <vector>

#include "cfpos/common.hpp"
#include "cfpos/rng.hpp"

namespace cfpos {

enum class LosMode { always_los, always_nlos, probabilistic };

/// Three-slope log-distance model constants (dB domain).
struct PathLossParams {
    double fixed_loss_db = 140.7;
    double inner_break_m = 10.0;   // d0
    double outer_break_m = 50.0;   // d1
};

struct ScenarioConfig {
    double area_side = 100.0;        // meters, square deployment region
    int ap_count = 9;                // M
    int ue_count = 3;                // K
    int antennas_per_ap = 4;         // N, uniform linear array along +x
    int paths_per_link = 6;          // scattering paths per link
    double height_gap = 10.0;        // AP/UE height difference, meters
    int pilot_length = 0;            // tau_p; 0 means "equal to ue_count"
    double tx_power_w = 0.1;         // per-UE uplink power p_k
    double bandwidth_hz = 20e6;      // B
    double noise_figure_db = 7.0;
    int coherence_block = 200;       // tau_c, symbols
    std::uint64_t seed = 1;
    LosMode los_mode = LosMode::always_nlos;
    PathLossParams path_loss;
    double los_distance_threshold = 50.0;  // probabilistic mode: LoS iff d <= threshold
    double spacing_ratio = 0.5;            // antenna spacing over wavelength

    int effective_pilot_length() const { return pilot_length > 0 ? pilot_length : ue_count; }

    /// Throws std::invalid_argument on the first violated constraint.
    void validate() const;
};

struct Placement {
    std::vector<Vec2> ap_xy;
    std::vector<Vec2> ue_xy;
};

/// Large-scale propagation state of one AP-UE link.
struct LinkState {
    double beta = 0.0;        // linear power gain
    double kappa = 0.0;       // Rician factor, 0 when NLoS
    double los_angle = 0.0;   // radians in [0, pi]
    std::vector<double> nlos_angles;  // paths_per_link radians in [0, pi]
    double distance = 0.0;    // wrap-around distance incl. height gap
};

/// Minimum-image distance on the wrap-around square, including the vertical
/// AP/UE separation. Symmetric and bounded below by height_gap.
double wrap_distance(Vec2 p, Vec2 q, double area_side, double height_gap);

/// Three-slope path loss in dB (negative gain).
double path_loss_db(double distance_m, const PathLossParams& params = {});

/// Three-slope path loss as a linear power gain.
double path_loss(double distance_m, const PathLossParams& params = {});

/// Distance-decaying Rician factor for LoS links, zero otherwise.
double rician_factor(double distance_m, bool line_of_sight);

/// Broadside-folded arrival angle of the AP->UE ray in [0, pi]. All arrays
/// share orientation along +x; the minimum-image displacement is used so the
/// angle is consistent with wrap_distance.
double los_angle_between(Vec2 ap, Vec2 ue, double area_side);

/// 1 m position cell used to freeze per-position scattering state.
inline constexpr double kAngleCellSize = 1.0;

/// Cell key for a position; scattering path angles are a pure function of
/// (seed, ap index, cell), so two positions in the same cell share them.
std::uint64_t position_cell(Vec2 p, double cell_size = kAngleCellSize);

/// Frozen NLoS path angles for a link, uniform on [0, pi], derived from the
/// scenario seed, the AP index and the position cell.
std::vector<double> derive_nlos_angles(std::uint64_t seed, int ap_index,
                                       std::uint64_t cell, int paths);

/// Whether a link of the given length is line-of-sight under the mode.
bool is_line_of_sight(double distance_m, LosMode mode, double threshold_m);

/// Full large-scale state of the link between an AP and a position.
LinkState link_between(const ScenarioConfig& config, Vec2 ap, int ap_index, Vec2 position);

/// Immutable deployment: placements, per-link large-scale state, noise power.
class Scenario {
  public:
    static Scenario build(const ScenarioConfig& config);

    /// Reassembles a scenario from explicit placements (deserialization);
    /// link state and noise power are rebuilt, never trusted from the input.
    static Scenario from_parts(const ScenarioConfig& config, Placement placement);

    const ScenarioConfig& config() const { return config_; }
    const Placement& placement() const { return placement_; }
    double noise_power_w() const { return noise_power_w_; }

    int ap_count() const { return config_.ap_count; }
    int ue_count() const { return config_.ue_count; }

    const LinkState& link(int ap, int ue) const {
        return links_[static_cast<std::size_t>(ap) * config_.ue_count + ue];
    }

    /// Same APs, seed and propagation constants with relocated UEs; link
    /// state is rebuilt from geometry so the result matches a fresh build.
    Scenario with_ue_positions(const std::vector<Vec2>& ue_xy) const;

  private:
    Scenario() = default;
    void rebuild_links();

    ScenarioConfig config_;
    Placement placement_;
    std::vector<LinkState> links_;  // row-major [ap * K + ue]
    double noise_power_w_ = 0.0;
};

}  // namespace cfpos
