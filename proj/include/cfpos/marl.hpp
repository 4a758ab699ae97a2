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

#include <optional>
#include <vector>

#include "cfpos/features.hpp"
#include "cfpos/mlp.hpp"
#include "cfpos/similarity.hpp"

namespace cfpos {

/// Per-dimension action box. Squashed network outputs in [-1, 1] are mapped
/// affinely onto [lo, hi]; the same map normalizes stored actions back into
/// the squash domain for critic inputs.
struct ActionBounds {
    VectorXd lo;
    VectorXd hi;

    int size() const { return static_cast<int>(lo.size()); }
    VectorXd from_squash(const VectorXd& t) const;
    MatrixXd from_squash_batch(const MatrixXd& t) const;
    VectorXd to_squash(const VectorXd& a) const;
    MatrixXd to_squash_batch(const MatrixXd& a) const;
    VectorXd clamp(VectorXd a) const;
    VectorXd range() const { return hi - lo; }
};

/// One joint experience tuple: concatenated per-agent observations and
/// physical actions, plus the per-agent reward vector.
struct Transition {
    VectorXd joint_state;
    VectorXd joint_action;
    VectorXd rewards;
    VectorXd joint_next_state;
};

/// Fixed-capacity FIFO ring with seeded uniform sampling (no replacement
/// within a batch).
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    void push(Transition t);
    const Transition& at(std::size_t logical_index) const;

    /// Batch of distinct logical indices, oldest-first storage order.
    std::vector<std::size_t> sample_indices(std::size_t batch, RandomStream& rng) const;

  private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // next overwrite slot once full
    std::vector<Transition> entries_;
};

struct AgentHyper {
    double gamma = 0.99;
    double tau_soft = 0.01;
    double lr_actor = 1e-3;
    // Plain SGD needs the faster critic rate: at 1e-3 the value landscape is
    // still forming when the episode budget runs out and the policy wanders.
    double lr_critic = 1e-2;
    int batch_size = 32;
    std::size_t buffer_capacity = 64;
    double sigma_explore_init = 0.1;   // fraction of each action range
    double sigma_explore_final = 0.01;
    // Weight tau on the old target parameters (the update rule as printed).
    // Off by default: tau = 0.01 then leaves targets lagging far behind the
    // online networks, which is what keeps the gamma = 0.99 bootstrap stable;
    // the printed form makes targets track instantly and training diverges.
    bool paper_soft_update = false;

    void validate() const;
};

/// One AP-agent: actor/critic pairs with target copies and a replay buffer of
/// joint transitions. Critics are centralized (they see every agent's state
/// and action); actors see only their own observation.
struct AgentBundle {
    Mlp actor;
    Mlp critic;
    Mlp target_actor;
    Mlp target_critic;
    ReplayBuffer buffer;
    AgentHyper hyper;
    ActionBounds bounds;
    int agent_index = 0;
    int state_dim = 0;   // per-agent observation width
    int action_dim = 0;  // per-agent action width
    int agent_count = 0;

    static AgentBundle make(int agent_index, int agent_count, int state_dim, int action_dim,
                            const AgentHyper& hyper, const ActionBounds& bounds,
                            RandomStream& rng);
};

/// Deterministic policy output mapped into the action box; exploration adds
/// Gaussian noise (sigma_fraction of each range) before clamping.
VectorXd actor_act(const AgentBundle& bundle, const VectorXd& state, bool explore,
                   double sigma_fraction, RandomStream& rng);

/// Centralized action value for concatenated states and physical actions.
double critic_eval(const AgentBundle& bundle, const VectorXd& joint_state,
                   const VectorXd& joint_action);

/// One mean-squared Bellman error descent step for agent m's critic. Targets
/// use every agent's target actor on the stored next states. Returns the
/// pre-step loss.
double update_critic(std::vector<AgentBundle>& bundles, int agent_index,
                     const std::vector<std::size_t>& batch);

/// One ascent step on the mean critic value with agent m's batch actions
/// replaced by its current policy; other agents' actions stay as sampled.
/// Returns the pre-step objective.
double update_actor(std::vector<AgentBundle>& bundles, int agent_index,
                    const std::vector<std::size_t>& batch);

/// Soft-updates both target networks of the bundle.
void soft_update_targets(AgentBundle& bundle);

/// Projects an (distance, angle [+ offset]) action from an AP location,
/// clamped to the deployment square.
Vec2 position_from_action(Vec2 ap_xy, double distance, double angle, double angle_offset,
                          double area_side);

/// Positioning reward: negated sum of per-UE RSS dissimilarities between the
/// measured features and the agent's estimated positions, each normalized by
/// the UE's measured RSS magnitude over the evaluated subset. 0 is the
/// maximum; the reward never decreases when any single estimate moves closer
/// to its truth in RSS space. An all-zero gap profile (every estimate exact)
/// sets *degenerate.
double reward_positioning(const std::vector<FeatureSet>& measured,
                          const std::vector<Vec2>& estimated_positions,
                          const FeatureGenerator& generator,
                          const std::vector<std::vector<int>>& ap_subsets,
                          const std::vector<int>& ue_subset, bool* degenerate = nullptr);

/// Correction reward: sum over the evaluated UE set of the joint coefficient
/// between measured features and features at the corrected positions, with
/// the distance term normalized per UE (clamped to [0, 1]); exact matches
/// hit the joint cap.
double reward_correction(const std::vector<FeatureSet>& measured,
                         const std::vector<Vec2>& corrected_positions,
                         const FeatureGenerator& generator,
                         const std::vector<std::vector<int>>& ap_subsets,
                         const std::vector<int>& ue_subset, bool* degenerate = nullptr);

}  // namespace cfpos
