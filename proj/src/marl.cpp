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

#include "cfpos/marl.hpp"

#include <algorithm>
#include <cmath>

namespace cfpos {

VectorXd ActionBounds::from_squash(const VectorXd& t) const {
    return lo.array() + (t.array() + 1.0) * 0.5 * (hi - lo).array();
}

MatrixXd ActionBounds::from_squash_batch(const MatrixXd& t) const {
    MatrixXd a = t;
    for (int c = 0; c < a.cols(); ++c) {
        a.col(c) = lo(c) + (a.col(c).array() + 1.0) * 0.5 * (hi(c) - lo(c));
    }
    return a;
}

VectorXd ActionBounds::to_squash(const VectorXd& a) const {
    return 2.0 * (a - lo).array() / (hi - lo).array() - 1.0;
}

MatrixXd ActionBounds::to_squash_batch(const MatrixXd& a) const {
    MatrixXd t = a;
    for (int c = 0; c < t.cols(); ++c) {
        t.col(c) = 2.0 * (t.col(c).array() - lo(c)) / (hi(c) - lo(c)) - 1.0;
    }
    return t;
}

VectorXd ActionBounds::clamp(VectorXd a) const {
    for (int i = 0; i < a.size(); ++i) a(i) = std::min(std::max(a(i), lo(i)), hi(i));
    return a;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("replay_buffer: capacity must be >= 1");
    entries_.reserve(capacity_);
}

void ReplayBuffer::push(Transition t) {
    if (entries_.size() < capacity_) {
        entries_.push_back(std::move(t));
        return;
    }
    entries_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t logical_index) const {
    if (logical_index >= entries_.size()) throw std::out_of_range("replay_buffer: bad index");
    if (entries_.size() < capacity_) return entries_[logical_index];
    return entries_[(head_ + logical_index) % capacity_];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch, RandomStream& rng) const {
    if (entries_.empty()) throw std::invalid_argument("replay_buffer: empty buffer");
    if (batch > entries_.size()) {
        throw std::invalid_argument("replay_buffer: batch larger than fill level");
    }
    // Partial Fisher-Yates over logical indices.
    std::vector<std::size_t> pool(entries_.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    std::vector<std::size_t> picked(batch);
    for (std::size_t i = 0; i < batch; ++i) {
        const std::size_t j = i + rng.uniform_index(pool.size() - i);
        std::swap(pool[i], pool[j]);
        picked[i] = pool[i];
    }
    return picked;
}

void AgentHyper::validate() const {
    if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("hyper: gamma outside [0, 1)");
    if (tau_soft <= 0.0 || tau_soft > 1.0) throw std::invalid_argument("hyper: tau outside (0, 1]");
    if (lr_actor <= 0.0 || lr_critic <= 0.0) throw std::invalid_argument("hyper: rates positive");
    if (batch_size < 1) throw std::invalid_argument("hyper: batch_size must be >= 1");
    if (buffer_capacity == 0) throw std::invalid_argument("hyper: buffer capacity must be >= 1");
    if (sigma_explore_init < 0.0 || sigma_explore_final < 0.0) {
        throw std::invalid_argument("hyper: exploration noise must be >= 0");
    }
}

AgentBundle AgentBundle::make(int agent_index, int agent_count, int state_dim, int action_dim,
                              const AgentHyper& hyper, const ActionBounds& bounds,
                              RandomStream& rng) {
    hyper.validate();
    if (bounds.size() != action_dim) throw std::invalid_argument("bundle: bounds/action mismatch");
    const std::vector<int> actor_sizes{state_dim, 128, 64, action_dim};
    const std::vector<int> critic_sizes{agent_count * (state_dim + action_dim), 128, 64, 1};
    AgentBundle bundle{
        Mlp::make(actor_sizes, OutputActivation::squash, rng),
        Mlp::make(critic_sizes, OutputActivation::identity, rng),
        Mlp::make(actor_sizes, OutputActivation::squash, rng),
        Mlp::make(critic_sizes, OutputActivation::identity, rng),
        ReplayBuffer(hyper.buffer_capacity),
        hyper,
        bounds,
        agent_index,
        state_dim,
        action_dim,
        agent_count};
    // Targets start as exact copies.
    bundle.target_actor.set_parameters(bundle.actor.flatten_parameters());
    bundle.target_critic.set_parameters(bundle.critic.flatten_parameters());
    return bundle;
}

VectorXd actor_act(const AgentBundle& bundle, const VectorXd& state, bool explore,
                   double sigma_fraction, RandomStream& rng) {
    VectorXd action = bundle.bounds.from_squash(bundle.actor.forward(state));
    if (explore && sigma_fraction > 0.0) {
        const VectorXd range = bundle.bounds.range();
        for (int i = 0; i < action.size(); ++i) {
            action(i) += rng.gaussian(0.0, sigma_fraction * range(i));
        }
    }
    return bundle.bounds.clamp(std::move(action));
}

double critic_eval(const AgentBundle& bundle, const VectorXd& joint_state,
                   const VectorXd& joint_action) {
    VectorXd input(joint_state.size() + joint_action.size());
    input << joint_state, joint_action;
    return bundle.critic.forward(input)(0);
}

namespace {

struct BatchViews {
    MatrixXd states;        // B x (M * sd)
    MatrixXd actions_norm;  // B x (M * ad), squash domain
    MatrixXd next_states;
    VectorXd rewards;  // agent's own column
};

BatchViews gather_batch(const std::vector<AgentBundle>& bundles, int agent_index,
                        const std::vector<std::size_t>& batch) {
    const AgentBundle& self = bundles[agent_index];
    const auto b = static_cast<Eigen::Index>(batch.size());
    const int agents = self.agent_count;
    const int sd = self.state_dim;
    const int ad = self.action_dim;
    BatchViews views;
    views.states.resize(b, static_cast<Eigen::Index>(agents) * sd);
    views.actions_norm.resize(b, static_cast<Eigen::Index>(agents) * ad);
    views.next_states.resize(b, static_cast<Eigen::Index>(agents) * sd);
    views.rewards.resize(b);
    for (Eigen::Index i = 0; i < b; ++i) {
        const Transition& t = self.buffer.at(batch[i]);
        views.states.row(i) = t.joint_state;
        views.next_states.row(i) = t.joint_next_state;
        views.rewards(i) = t.rewards(agent_index);
        for (int a = 0; a < agents; ++a) {
            views.actions_norm.row(i).segment(static_cast<Eigen::Index>(a) * ad, ad) =
                bundles[a].bounds.to_squash(t.joint_action.segment(static_cast<Eigen::Index>(a) * ad, ad));
        }
    }
    return views;
}

MatrixXd concat_cols(const MatrixXd& a, const MatrixXd& b) {
    MatrixXd out(a.rows(), a.cols() + b.cols());
    out << a, b;
    return out;
}

}  // namespace

double update_critic(std::vector<AgentBundle>& bundles, int agent_index,
                     const std::vector<std::size_t>& batch) {
    AgentBundle& self = bundles[agent_index];
    if (batch.empty()) throw std::invalid_argument("update_critic: empty batch");
    BatchViews views = gather_batch(bundles, agent_index, batch);
    const auto b = views.states.rows();
    const int agents = self.agent_count;
    const int sd = self.state_dim;
    const int ad = self.action_dim;

    // Next joint action from every agent's target policy (squash domain).
    MatrixXd next_actions(b, static_cast<Eigen::Index>(agents) * ad);
    for (int a = 0; a < agents; ++a) {
        const MatrixXd obs = views.next_states.middleCols(static_cast<Eigen::Index>(a) * sd, sd);
        next_actions.middleCols(static_cast<Eigen::Index>(a) * ad, ad) =
            bundles[a].target_actor.forward_batch(obs);
    }
    const VectorXd next_q =
        self.target_critic.forward_batch(concat_cols(views.next_states, next_actions)).col(0);
    const VectorXd targets = views.rewards + self.hyper.gamma * next_q;

    MlpCache cache;
    const VectorXd q =
        self.critic.forward_batch(concat_cols(views.states, views.actions_norm), &cache).col(0);
    const VectorXd err = q - targets;
    const double loss = err.squaredNorm() / static_cast<double>(b);

    MatrixXd upstream = (2.0 / static_cast<double>(b)) * err;
    const MlpGradients grads = self.critic.backward_batch(cache, upstream);
    self.critic.apply_step(grads, self.hyper.lr_critic, -1.0);
    return loss;
}

double update_actor(std::vector<AgentBundle>& bundles, int agent_index,
                    const std::vector<std::size_t>& batch) {
    AgentBundle& self = bundles[agent_index];
    if (batch.empty()) throw std::invalid_argument("update_actor: empty batch");
    BatchViews views = gather_batch(bundles, agent_index, batch);
    const auto b = views.states.rows();
    const int sd = self.state_dim;
    const int ad = self.action_dim;

    MlpCache actor_cache;
    const MatrixXd own_obs = views.states.middleCols(static_cast<Eigen::Index>(agent_index) * sd, sd);
    const MatrixXd own_actions = self.actor.forward_batch(own_obs, &actor_cache);

    MatrixXd actions = views.actions_norm;
    actions.middleCols(static_cast<Eigen::Index>(agent_index) * ad, ad) = own_actions;

    MlpCache critic_cache;
    const VectorXd q = self.critic.forward_batch(concat_cols(views.states, actions), &critic_cache).col(0);
    const double objective = q.mean();

    const MatrixXd upstream_q = MatrixXd::Constant(b, 1, 1.0 / static_cast<double>(b));
    const MlpGradients critic_grads = self.critic.backward_batch(critic_cache, upstream_q);
    const MatrixXd upstream_actor = critic_grads.input.middleCols(
        views.states.cols() + static_cast<Eigen::Index>(agent_index) * ad, ad);

    const MlpGradients actor_grads = self.actor.backward_batch(actor_cache, upstream_actor);
    self.actor.apply_step(actor_grads, self.hyper.lr_actor, +1.0);
    return objective;
}

void soft_update_targets(AgentBundle& bundle) {
    const bool swap = !bundle.hyper.paper_soft_update;
    soft_update(bundle.target_actor, bundle.actor, bundle.hyper.tau_soft, swap);
    soft_update(bundle.target_critic, bundle.critic, bundle.hyper.tau_soft, swap);
}

Vec2 position_from_action(Vec2 ap_xy, double distance, double angle, double angle_offset,
                          double area_side) {
    if (distance < 0.0) throw std::invalid_argument("position_from_action: distance must be >= 0");
    const double heading = angle + angle_offset;
    Vec2 p{ap_xy.x + distance * std::cos(heading), ap_xy.y + distance * std::sin(heading)};
    p.x = std::min(std::max(p.x, 0.0), area_side);
    p.y = std::min(std::max(p.y, 0.0), area_side);
    return p;
}

namespace {

// Per-UE normalization scale for reward dissimilarities: the measured RSS
// magnitude over the evaluated subset. A shared max over the UE set (the
// bare normalization of the coefficient definitions) makes every agent's
// reward IMPROVE when its naturally largest-gap UE is pushed farther away,
// so trained agents sacrifice that UE; a fixed per-UE scale keeps the reward
// monotone in every gap while still making the UEs' contributions
// magnitude-comparable.
double measured_scale(const FeatureSet& measured, const std::vector<int>& subset) {
    double acc = 0.0;
    for (int m : subset) acc += measured.rss(m) * measured.rss(m);
    return std::sqrt(acc);
}

}  // namespace

double reward_positioning(const std::vector<FeatureSet>& measured,
                          const std::vector<Vec2>& estimated_positions,
                          const FeatureGenerator& generator,
                          const std::vector<std::vector<int>>& ap_subsets,
                          const std::vector<int>& ue_subset, bool* degenerate) {
    if (ue_subset.empty()) throw std::invalid_argument("reward_positioning: empty UE subset");
    double total = 0.0;
    double max_gap = 0.0;
    for (int k : ue_subset) {
        const VectorXd psi_hyp = generator.hypothesis_rss(estimated_positions[k]);
        const double gap = distance_dissimilarity(measured[k].rss, psi_hyp, ap_subsets[k]);
        max_gap = std::max(max_gap, gap);
        total += gap / measured_scale(measured[k], ap_subsets[k]);
    }
    if (max_gap <= 0.0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    return -total;
}

double reward_correction(const std::vector<FeatureSet>& measured,
                         const std::vector<Vec2>& corrected_positions,
                         const FeatureGenerator& generator,
                         const std::vector<std::vector<int>>& ap_subsets,
                         const std::vector<int>& ue_subset, bool* degenerate) {
    if (ue_subset.empty()) return 0.0;
    double total = 0.0;
    double max_gap = 0.0;
    for (std::size_t i = 0; i < ue_subset.size(); ++i) {
        const int k = ue_subset[i];
        const FeatureSet hyp = generator.hypothesis(corrected_positions[k]);
        const double gap = distance_dissimilarity(measured[k].rss, hyp.rss, ap_subsets[k]);
        max_gap = std::max(max_gap, gap);
        const double angle = angle_similarity(measured[k].angular, hyp.angular, ap_subsets[k],
                                              AngleAggregate::normalized)
                                 .aggregate;
        const double dbar = std::min(gap / measured_scale(measured[k], ap_subsets[k]), 1.0);
        total += joint_similarity(dbar, angle);
    }
    if (max_gap <= 0.0 && degenerate) *degenerate = true;
    return total;
}

}  // namespace cfpos
