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

#include <utility>
#include <vector>

#include "cfpos/similarity.hpp"

namespace cfpos {

/// Fused position estimate with its provenance.
struct PositionEstimate {
    int ue_index = -1;
    Vec2 xy;
    std::vector<int> contributing_aps;   // descending coefficient order
    std::vector<double> weights;         // match contributing_aps, sum to 1
    std::vector<double> per_ap_joint;    // coefficients of the contributors
};

/// APs whose joint coefficient passes the threshold, strongest first (ties by
/// ascending index), truncated to at most max_aps. Falls back to the single
/// best AP when nothing passes.
std::vector<int> cowknn_select(const std::vector<double>& per_ap_joint, double threshold,
                               int max_aps);

/// Normalized contribution weights, proportional to the coefficients.
std::vector<double> cowknn_weights(const std::vector<double>& selected_coefficients);

/// Joint coefficient of each AP's position hypothesis for one UE, evaluated
/// over the AP subset; the distance terms are normalized across the M
/// hypotheses being compared.
std::vector<double> cowknn_coefficients(const FeatureSet& measured,
                                        const std::vector<FeatureSet>& per_ap_hypotheses,
                                        const std::vector<int>& subset);

/// Weighted fusion of the per-AP projected points (Co-WKNN). Positions are
/// projected from each AP with its (distance, angle + offset) action, the
/// passing APs are combined convexly, and the result is clamped to the area.
PositionEstimate cowknn_estimate(int ue_index, const std::vector<Vec2>& ap_xy,
                                 const std::vector<double>& distances,
                                 const std::vector<double>& angles,
                                 const std::vector<double>& angle_offsets,
                                 const std::vector<double>& per_ap_joint, double threshold,
                                 int max_aps, double area_side);

/// Offline reference grid with precomputed features.
struct FingerprintDb {
    double spacing = 0.0;                // eta, meters
    std::vector<Vec2> points;            // row-major over the grid
    std::vector<FeatureSet> features;    // one per point

    std::size_t size() const { return points.size(); }
};

/// Uniform grid over [0, side] with step eta (both edges included),
/// (floor(side/eta) + 1)^2 points, features synthesized at every point.
FingerprintDb build_fingerprint_db(const FeatureGenerator& generator, double eta);

enum class FingerprintMetric { rss, aoa, joint };

/// Nearest-reference estimation. Reference points are ranked by the metric
/// (rss: reciprocal max-normalized RSS distance; aoa: mean angular cosine;
/// joint: the joint coefficient), ties broken by ascending point index.
/// k = 1 unweighted is the basic scheme; weighted averages by similarity.
PositionEstimate knn_wknn_estimate(const FeatureSet& query, const FingerprintDb& db, int k,
                                   bool weighted, FingerprintMetric metric);

/// Root mean square positioning error over matched coordinate lists.
double rmse(const std::vector<Vec2>& actual, const std::vector<Vec2>& estimated);

/// Empirical CDF of the errors: one step per distinct value, fractions i/n.
std::vector<std::pair<double, double>> cdf_curve(std::vector<double> errors);

}  // namespace cfpos
