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

#include "cfpos/estimate.hpp"
#include "cfpos/marl.hpp"

namespace cfpos {

/// Joint positioning + correction training configuration. The positioning
/// network maps per-agent RSS observations to (distance, angle) pairs per UE;
/// the correction network maps those angles to bounded angle offsets.
struct JpcHyper {
    AgentHyper positioning;
    AgentHyper correction;
    int episodes = 2000;
    int steps_per_episode = 10;
    int eval_subset_size = 0;       // L_k; 0 selects every AP
    int cowknn_max_aps = 0;         // M_c; 0 means ceil(M / 2)
    double cowknn_threshold = -1.0; // < 0 uses the per-UE median coefficient
    double delta_max = kPi / 4.0;   // correction offset bound
    double d_max = 0.0;             // 0 means the area diagonal
    bool log_compress_correction = true;  // store log10(1 + r^c) in the buffer
    // Training solves the positioning problem for the scenario's own UE
    // layout (observations are static, agents learn the instance optimum).
    // Turning this on redraws the layout every episode; per-agent RSS
    // observations cannot identify UE bearings, so generalization across
    // layouts caps far above the instance accuracy.
    bool randomize_ue_per_episode = false;
    double rss_obs_offset_db = 85.0;  // observation scaling: (dB + offset) * scale
    double rss_obs_scale = 0.1;

    JpcHyper() {
        positioning.buffer_capacity = 64;
        correction.buffer_capacity = 512;
    }
};

struct TrainingLogRow {
    int episode = 0;
    double mean_reward_p = 0.0;
    double mean_reward_c = 0.0;
    double eval_rmse = 0.0;
};

struct TrainingLog {
    std::vector<TrainingLogRow> rows;
    int degenerate_reward_events = 0;
};

struct JpcResult {
    std::vector<AgentBundle> positioning;
    std::vector<AgentBundle> correction;
    TrainingLog log;
    std::vector<PositionEstimate> final_estimates;  // canonical UE layout
    double final_rmse = 0.0;
};

/// Observation maps shared by training and evaluation.
VectorXd rss_observation(const VectorXd& psi, double offset_db, double scale);
VectorXd angle_observation(const VectorXd& angles);

/// Runs the two-network loop: per step the positioning agents act on RSS, the
/// correction agents act on the resulting angles, both rewards are computed,
/// transitions are stored and every agent takes one critic/actor/soft-update
/// round once its buffer holds a batch. Fully reproducible from the scenario
/// seed. Throws on non-finite parameters, naming episode and step.
JpcResult train_jpc(const Scenario& scenario, const FeatureGenerator& generator,
                    const JpcHyper& hyper);

/// Greedy (no exploration) Co-WKNN estimates of the scenario's canonical UE
/// layout under the given trained bundles.
std::vector<PositionEstimate> evaluate_jpc(const Scenario& scenario,
                                           const FeatureGenerator& generator,
                                           const std::vector<AgentBundle>& positioning,
                                           const std::vector<AgentBundle>& correction,
                                           const JpcHyper& hyper);

}  // namespace cfpos
