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

#include "cfpos/jpc.hpp"

#include <algorithm>
#include <cmath>

namespace cfpos {

VectorXd rss_observation(const VectorXd& psi, double offset_db, double scale) {
    VectorXd obs(psi.size());
    for (int i = 0; i < psi.size(); ++i) {
        obs(i) = (10.0 * std::log10(std::max(psi(i), 1e-30)) + offset_db) * scale;
    }
    return obs;
}

VectorXd angle_observation(const VectorXd& angles) {
    return (angles.array() / kPi - 1.0).matrix();
}

namespace {

struct StepOutcome {
    std::vector<VectorXd> actions_p;  // physical, per agent: [d_1..d_K, th_1..th_K]
    std::vector<VectorXd> actions_c;  // physical, per agent: [dth_1..dth_K]
    std::vector<VectorXd> obs_c;      // correction observations (the angles)
    VectorXd rewards_p;
    VectorXd rewards_c;
};

struct EpisodeContext {
    std::vector<Vec2> layout;
    std::vector<FeatureSet> measured;
    std::vector<VectorXd> obs_p;           // per agent
    VectorXd joint_obs_p;                  // concatenation
    std::vector<std::vector<int>> ap_subsets;  // S_k per UE
    std::vector<int> ue_subset;                // evaluated UEs (all K)
};

VectorXd concat(const std::vector<VectorXd>& parts) {
    Eigen::Index total = 0;
    for (const auto& p : parts) total += p.size();
    VectorXd out(total);
    Eigen::Index pos = 0;
    for (const auto& p : parts) {
        out.segment(pos, p.size()) = p;
        pos += p.size();
    }
    return out;
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

/// Per-(agent, UE) projected positions, with and without correction.
void project_positions(const Scenario& scenario, const std::vector<VectorXd>& actions_p,
                       const std::vector<VectorXd>& actions_c, bool apply_correction,
                       std::vector<std::vector<Vec2>>& out) {
    const auto& cfg = scenario.config();
    const int agents = cfg.ap_count;
    const int ues = cfg.ue_count;
    out.assign(agents, std::vector<Vec2>(ues));
    for (int m = 0; m < agents; ++m) {
        for (int k = 0; k < ues; ++k) {
            const double d = actions_p[m](k);
            const double th = actions_p[m](ues + k);
            const double dth = apply_correction ? actions_c[m](k) : 0.0;
            out[m][k] = position_from_action(scenario.placement().ap_xy[m], d, th, dth,
                                             cfg.area_side);
        }
    }
}

std::vector<PositionEstimate> fuse_estimates(const Scenario& scenario,
                                             const FeatureGenerator& generator,
                                             const EpisodeContext& ctx,
                                             const std::vector<std::vector<Vec2>>& corrected,
                                             const std::vector<VectorXd>& actions_p,
                                             const std::vector<VectorXd>& actions_c,
                                             const JpcHyper& hyper) {
    const auto& cfg = scenario.config();
    const int agents = cfg.ap_count;
    const int ues = cfg.ue_count;
    const int max_aps = hyper.cowknn_max_aps > 0 ? hyper.cowknn_max_aps : (agents + 1) / 2;

    std::vector<PositionEstimate> estimates;
    estimates.reserve(static_cast<std::size_t>(ues));
    for (int k = 0; k < ues; ++k) {
        std::vector<FeatureSet> hyps;
        hyps.reserve(static_cast<std::size_t>(agents));
        for (int m = 0; m < agents; ++m) hyps.push_back(generator.hypothesis(corrected[m][k]));
        const std::vector<double> joints =
            cowknn_coefficients(ctx.measured[k], hyps, ctx.ap_subsets[k]);
        const double threshold =
            hyper.cowknn_threshold >= 0.0 ? hyper.cowknn_threshold : median_of(joints);

        std::vector<double> distances(agents);
        std::vector<double> angles(agents);
        std::vector<double> offsets(agents);
        for (int m = 0; m < agents; ++m) {
            distances[m] = actions_p[m](k);
            angles[m] = actions_p[m](ues + k);
            offsets[m] = actions_c[m](k);
        }
        PositionEstimate est =
            cowknn_estimate(k, scenario.placement().ap_xy, distances, angles, offsets, joints,
                            threshold, max_aps, cfg.area_side);
        estimates.push_back(std::move(est));
    }
    return estimates;
}

}  // namespace

JpcResult train_jpc(const Scenario& scenario, const FeatureGenerator& generator,
                    const JpcHyper& hyper) {
    const auto& cfg = scenario.config();
    const int agents = cfg.ap_count;
    const int ues = cfg.ue_count;
    if (hyper.episodes < 1 || hyper.steps_per_episode < 1) {
        throw std::invalid_argument("train_jpc: episodes and steps must be >= 1");
    }
    const double d_max =
        hyper.d_max > 0.0 ? hyper.d_max : cfg.area_side * std::sqrt(2.0);

    // Action boxes: distances then angles for positioning, offsets for correction.
    ActionBounds bounds_p{VectorXd::Zero(2 * ues), VectorXd::Zero(2 * ues)};
    for (int k = 0; k < ues; ++k) {
        bounds_p.lo(k) = 0.0;
        bounds_p.hi(k) = d_max;
        bounds_p.lo(ues + k) = 0.0;
        bounds_p.hi(ues + k) = 2.0 * kPi;
    }
    ActionBounds bounds_c{VectorXd::Constant(ues, -hyper.delta_max),
                          VectorXd::Constant(ues, hyper.delta_max)};

    RandomStream master = RandomStream(cfg.seed).substream(stream_tag::kTraining);
    RandomStream init_stream = master.substream(1);
    RandomStream ue_stream = master.substream(2);
    RandomStream explore_stream = master.substream(3);
    RandomStream sample_stream = master.substream(4);

    JpcResult result;
    for (int m = 0; m < agents; ++m) {
        result.positioning.push_back(
            AgentBundle::make(m, agents, ues, 2 * ues, hyper.positioning, bounds_p, init_stream));
        result.correction.push_back(
            AgentBundle::make(m, agents, ues, ues, hyper.correction, bounds_c, init_stream));
    }

    const std::vector<int> all_aps = [&] {
        std::vector<int> v(static_cast<std::size_t>(agents));
        for (int m = 0; m < agents; ++m) v[m] = m;
        return v;
    }();
    const std::vector<int> all_ues = [&] {
        std::vector<int> v(static_cast<std::size_t>(ues));
        for (int k = 0; k < ues; ++k) v[k] = k;
        return v;
    }();

    auto build_context = [&](const std::vector<Vec2>& layout) {
        EpisodeContext ctx;
        ctx.layout = layout;
        ctx.measured.reserve(layout.size());
        for (const Vec2& p : layout) ctx.measured.push_back(generator.hypothesis(p));
        ctx.obs_p.resize(static_cast<std::size_t>(agents));
        for (int m = 0; m < agents; ++m) {
            VectorXd psi_col(ues);
            for (int k = 0; k < ues; ++k) psi_col(k) = ctx.measured[k].rss(m);
            ctx.obs_p[m] = rss_observation(psi_col, hyper.rss_obs_offset_db, hyper.rss_obs_scale);
        }
        ctx.joint_obs_p = concat(ctx.obs_p);
        ctx.ue_subset = all_ues;
        ctx.ap_subsets.assign(static_cast<std::size_t>(ues), all_aps);
        return ctx;
    };

    // Evaluation subsets narrower than M are refreshed per episode from the
    // coefficients of the greedy hypotheses on the fresh layout.
    auto refresh_subsets = [&](EpisodeContext& ctx) {
        if (hyper.eval_subset_size <= 0 || hyper.eval_subset_size >= agents) return;
        std::vector<VectorXd> greedy_p(static_cast<std::size_t>(agents));
        std::vector<VectorXd> greedy_c(static_cast<std::size_t>(agents));
        for (int m = 0; m < agents; ++m) {
            greedy_p[m] = actor_act(result.positioning[m], ctx.obs_p[m], false, 0.0, explore_stream);
            greedy_c[m] = VectorXd::Zero(ues);
        }
        std::vector<std::vector<Vec2>> projected;
        project_positions(scenario, greedy_p, greedy_c, false, projected);
        for (int k = 0; k < ues; ++k) {
            std::vector<FeatureSet> hyps;
            hyps.reserve(static_cast<std::size_t>(agents));
            for (int m = 0; m < agents; ++m) hyps.push_back(generator.hypothesis(projected[m][k]));
            const std::vector<double> joints = cowknn_coefficients(ctx.measured[k], hyps, all_aps);
            ctx.ap_subsets[k] = select_evaluation_subset(joints, hyper.eval_subset_size,
                                                         SubsetScheme::highest_similarity);
        }
    };

    const EpisodeContext canonical = build_context(scenario.placement().ue_xy);

    const long total_steps =
        static_cast<long>(hyper.episodes) * hyper.steps_per_episode;
    long global_step = 0;

    auto sigma_at = [&](const AgentHyper& h) {
        const double progress =
            total_steps > 1 ? static_cast<double>(global_step) / (total_steps - 1) : 0.0;
        return h.sigma_explore_init + (h.sigma_explore_final - h.sigma_explore_init) * progress;
    };

    auto run_updates = [&](std::vector<AgentBundle>& bundles) {
        for (int m = 0; m < agents; ++m) {
            AgentBundle& bundle = bundles[m];
            if (bundle.buffer.size() < static_cast<std::size_t>(bundle.hyper.batch_size)) continue;
            const auto batch = bundle.buffer.sample_indices(
                static_cast<std::size_t>(bundle.hyper.batch_size), sample_stream);
            update_critic(bundles, m, batch);
            update_actor(bundles, m, batch);
            soft_update_targets(bundle);
        }
    };

    for (int episode = 0; episode < hyper.episodes; ++episode) {
        EpisodeContext ctx = canonical;
        if (hyper.randomize_ue_per_episode) {
            std::vector<Vec2> layout(static_cast<std::size_t>(ues));
            for (auto& p : layout) {
                p.x = ue_stream.uniform(0.0, cfg.area_side);
                p.y = ue_stream.uniform(0.0, cfg.area_side);
            }
            ctx = build_context(layout);
        }
        refresh_subsets(ctx);

        double reward_p_acc = 0.0;
        double reward_c_acc = 0.0;
        bool have_pending_c = false;
        Transition pending_c;

        for (int step = 0; step < hyper.steps_per_episode; ++step, ++global_step) {
            StepOutcome out;
            out.actions_p.resize(static_cast<std::size_t>(agents));
            out.actions_c.resize(static_cast<std::size_t>(agents));
            out.obs_c.resize(static_cast<std::size_t>(agents));
            const double sigma_p = sigma_at(hyper.positioning);
            const double sigma_c = sigma_at(hyper.correction);
            for (int m = 0; m < agents; ++m) {
                out.actions_p[m] =
                    actor_act(result.positioning[m], ctx.obs_p[m], true, sigma_p, explore_stream);
                out.obs_c[m] = angle_observation(out.actions_p[m].tail(ues));
                out.actions_c[m] =
                    actor_act(result.correction[m], out.obs_c[m], true, sigma_c, explore_stream);
            }
            const VectorXd joint_obs_c = concat(out.obs_c);

            std::vector<std::vector<Vec2>> plain;
            std::vector<std::vector<Vec2>> corrected;
            project_positions(scenario, out.actions_p, out.actions_c, false, plain);
            project_positions(scenario, out.actions_p, out.actions_c, true, corrected);

            out.rewards_p.resize(agents);
            out.rewards_c.resize(agents);
            for (int m = 0; m < agents; ++m) {
                bool degenerate = false;
                out.rewards_p(m) = reward_positioning(ctx.measured, plain[m], generator,
                                                      ctx.ap_subsets, ctx.ue_subset, &degenerate);
                if (degenerate) ++result.log.degenerate_reward_events;
                degenerate = false;
                double rc = reward_correction(ctx.measured, corrected[m], generator,
                                              ctx.ap_subsets, ctx.ue_subset, &degenerate);
                if (degenerate) ++result.log.degenerate_reward_events;
                if (hyper.log_compress_correction) rc = std::log10(1.0 + rc);
                out.rewards_c(m) = rc;
            }
            reward_p_acc += out.rewards_p.mean();
            reward_c_acc += out.rewards_c.mean();

            // Positioning transitions close immediately: the RSS observation
            // is static within the episode.
            Transition tp;
            tp.joint_state = ctx.joint_obs_p;
            tp.joint_next_state = ctx.joint_obs_p;
            tp.joint_action = concat(out.actions_p);
            tp.rewards = out.rewards_p;
            for (int m = 0; m < agents; ++m) result.positioning[m].buffer.push(tp);

            // Correction transitions wait for the next step's angles.
            if (have_pending_c) {
                pending_c.joint_next_state = joint_obs_c;
                for (int m = 0; m < agents; ++m) result.correction[m].buffer.push(pending_c);
            }
            pending_c.joint_state = joint_obs_c;
            pending_c.joint_action = concat(out.actions_c);
            pending_c.rewards = out.rewards_c;
            have_pending_c = true;

            run_updates(result.positioning);
            run_updates(result.correction);
        }
        if (have_pending_c) {
            pending_c.joint_next_state = pending_c.joint_state;
            for (int m = 0; m < agents; ++m) result.correction[m].buffer.push(pending_c);
        }

        for (int m = 0; m < agents; ++m) {
            if (!result.positioning[m].actor.parameters_finite() ||
                !result.positioning[m].critic.parameters_finite() ||
                !result.correction[m].actor.parameters_finite() ||
                !result.correction[m].critic.parameters_finite()) {
                throw std::runtime_error("train_jpc: non-finite parameters at episode " +
                                         std::to_string(episode) + ", agent " + std::to_string(m));
            }
        }

        const std::vector<PositionEstimate> eval = evaluate_jpc(
            scenario, generator, result.positioning, result.correction, hyper);
        std::vector<Vec2> estimated;
        estimated.reserve(eval.size());
        for (const auto& e : eval) estimated.push_back(e.xy);
        const double eval_rmse = rmse(scenario.placement().ue_xy, estimated);

        result.log.rows.push_back({episode, reward_p_acc / hyper.steps_per_episode,
                                   reward_c_acc / hyper.steps_per_episode, eval_rmse});
        if (episode + 1 == hyper.episodes) {
            result.final_estimates = eval;
            result.final_rmse = eval_rmse;
        }
    }
    return result;
}

std::vector<PositionEstimate> evaluate_jpc(const Scenario& scenario,
                                           const FeatureGenerator& generator,
                                           const std::vector<AgentBundle>& positioning,
                                           const std::vector<AgentBundle>& correction,
                                           const JpcHyper& hyper) {
    const auto& cfg = scenario.config();
    const int agents = cfg.ap_count;
    const int ues = cfg.ue_count;
    RandomStream unused(0);

    EpisodeContext ctx;
    ctx.layout = scenario.placement().ue_xy;
    for (const Vec2& p : ctx.layout) ctx.measured.push_back(generator.hypothesis(p));
    ctx.obs_p.resize(static_cast<std::size_t>(agents));
    for (int m = 0; m < agents; ++m) {
        VectorXd psi_col(ues);
        for (int k = 0; k < ues; ++k) psi_col(k) = ctx.measured[k].rss(m);
        ctx.obs_p[m] = rss_observation(psi_col, hyper.rss_obs_offset_db, hyper.rss_obs_scale);
    }
    ctx.ue_subset.resize(static_cast<std::size_t>(ues));
    for (int k = 0; k < ues; ++k) ctx.ue_subset[k] = k;
    std::vector<int> all_aps(static_cast<std::size_t>(agents));
    for (int m = 0; m < agents; ++m) all_aps[m] = m;
    ctx.ap_subsets.assign(static_cast<std::size_t>(ues), all_aps);

    std::vector<VectorXd> actions_p(static_cast<std::size_t>(agents));
    std::vector<VectorXd> actions_c(static_cast<std::size_t>(agents));
    for (int m = 0; m < agents; ++m) {
        actions_p[m] = actor_act(positioning[m], ctx.obs_p[m], false, 0.0, unused);
        const VectorXd obs_c = angle_observation(actions_p[m].tail(ues));
        actions_c[m] = actor_act(correction[m], obs_c, false, 0.0, unused);
    }
    std::vector<std::vector<Vec2>> corrected;
    project_positions(scenario, actions_p, actions_c, true, corrected);
    return fuse_estimates(scenario, generator, ctx, corrected, actions_p, actions_c, hyper);
}

}  // namespace cfpos
