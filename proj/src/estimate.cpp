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

#include "cfpos/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cfpos {

std::vector<int> cowknn_select(const std::vector<double>& per_ap_joint, double threshold,
                               int max_aps) {
    if (max_aps < 1) throw std::invalid_argument("cowknn_select: max_aps must be >= 1");
    if (per_ap_joint.empty()) throw std::invalid_argument("cowknn_select: no coefficients");
    std::vector<int> order(per_ap_joint.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (per_ap_joint[a] != per_ap_joint[b]) return per_ap_joint[a] > per_ap_joint[b];
        return a < b;
    });
    std::vector<int> selected;
    for (int m : order) {
        if (per_ap_joint[m] >= threshold && static_cast<int>(selected.size()) < max_aps) {
            selected.push_back(m);
        }
    }
    if (selected.empty()) selected.push_back(order.front());
    return selected;
}

std::vector<double> cowknn_weights(const std::vector<double>& selected_coefficients) {
    if (selected_coefficients.empty()) throw std::invalid_argument("cowknn_weights: empty input");
    double total = 0.0;
    for (double c : selected_coefficients) {
        if (c <= 0.0) throw std::invalid_argument("cowknn_weights: coefficients must be positive");
        total += c;
    }
    std::vector<double> weights(selected_coefficients.size());
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = selected_coefficients[i] / total;
    return weights;
}

std::vector<double> cowknn_coefficients(const FeatureSet& measured,
                                        const std::vector<FeatureSet>& per_ap_hypotheses,
                                        const std::vector<int>& subset) {
    std::vector<double> gaps(per_ap_hypotheses.size());
    std::vector<double> angles(per_ap_hypotheses.size());
    for (std::size_t m = 0; m < per_ap_hypotheses.size(); ++m) {
        gaps[m] = distance_dissimilarity(measured.rss, per_ap_hypotheses[m].rss, subset);
        angles[m] = angle_similarity(measured.angular, per_ap_hypotheses[m].angular, subset,
                                     AngleAggregate::normalized)
                        .aggregate;
    }
    const double maximum = *std::max_element(gaps.begin(), gaps.end());
    std::vector<double> joints(per_ap_hypotheses.size());
    for (std::size_t m = 0; m < joints.size(); ++m) {
        const double dbar = maximum > 0.0 ? gaps[m] / maximum : 0.0;
        joints[m] = joint_similarity(dbar, angles[m]);
    }
    return joints;
}

PositionEstimate cowknn_estimate(int ue_index, const std::vector<Vec2>& ap_xy,
                                 const std::vector<double>& distances,
                                 const std::vector<double>& angles,
                                 const std::vector<double>& angle_offsets,
                                 const std::vector<double>& per_ap_joint, double threshold,
                                 int max_aps, double area_side) {
    const std::size_t ap_count = ap_xy.size();
    if (distances.size() != ap_count || angles.size() != ap_count ||
        angle_offsets.size() != ap_count || per_ap_joint.size() != ap_count) {
        throw std::invalid_argument("cowknn_estimate: per-AP arrays must cover every AP");
    }
    PositionEstimate est;
    est.ue_index = ue_index;
    est.contributing_aps = cowknn_select(per_ap_joint, threshold, max_aps);
    std::vector<double> coeffs;
    coeffs.reserve(est.contributing_aps.size());
    for (int m : est.contributing_aps) coeffs.push_back(per_ap_joint[m]);
    est.per_ap_joint = coeffs;
    est.weights = cowknn_weights(coeffs);

    double x = 0.0;
    double y = 0.0;
    for (std::size_t i = 0; i < est.contributing_aps.size(); ++i) {
        const int m = est.contributing_aps[i];
        const double heading = angles[m] + angle_offsets[m];
        x += est.weights[i] * (ap_xy[m].x + distances[m] * std::cos(heading));
        y += est.weights[i] * (ap_xy[m].y + distances[m] * std::sin(heading));
    }
    est.xy = {std::min(std::max(x, 0.0), area_side), std::min(std::max(y, 0.0), area_side)};
    return est;
}

FingerprintDb build_fingerprint_db(const FeatureGenerator& generator, double eta) {
    const double side = generator.scenario().config().area_side;
    if (eta <= 0.0 || eta > side) {
        throw std::invalid_argument("fingerprint: spacing must lie in (0, side]");
    }
    FingerprintDb db;
    db.spacing = eta;
    const int per_axis = static_cast<int>(std::floor(side / eta)) + 1;
    db.points.reserve(static_cast<std::size_t>(per_axis) * per_axis);
    db.features.reserve(db.points.capacity());
    for (int i = 0; i < per_axis; ++i) {
        for (int j = 0; j < per_axis; ++j) {
            const Vec2 p{i * eta, j * eta};
            db.points.push_back(p);
            db.features.push_back(generator.hypothesis(p));
        }
    }
    return db;
}

namespace {

std::vector<double> fingerprint_scores(const FeatureSet& query, const FingerprintDb& db,
                                       FingerprintMetric metric) {
    const std::size_t n = db.size();
    std::vector<int> all_aps(static_cast<std::size_t>(query.rss.size()));
    std::iota(all_aps.begin(), all_aps.end(), 0);

    std::vector<double> gaps(n);
    for (std::size_t i = 0; i < n; ++i) {
        gaps[i] = distance_dissimilarity(query.rss, db.features[i].rss, all_aps);
    }
    const double max_gap = *std::max_element(gaps.begin(), gaps.end());

    std::vector<double> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dbar = max_gap > 0.0 ? gaps[i] / max_gap : 0.0;
        switch (metric) {
            case FingerprintMetric::rss:
                scores[i] = 1.0 / (dbar + kSimilarityEpsilon);
                break;
            case FingerprintMetric::aoa:
                scores[i] = angle_similarity(query.angular, db.features[i].angular, all_aps,
                                             AngleAggregate::normalized)
                                .aggregate;
                break;
            case FingerprintMetric::joint: {
                const double a = angle_similarity(query.angular, db.features[i].angular, all_aps,
                                                  AngleAggregate::normalized)
                                     .aggregate;
                scores[i] = joint_similarity(dbar, a);
                break;
            }
        }
    }
    return scores;
}

}  // namespace

PositionEstimate knn_wknn_estimate(const FeatureSet& query, const FingerprintDb& db, int k,
                                   bool weighted, FingerprintMetric metric) {
    if (db.size() == 0) throw std::invalid_argument("knn_wknn_estimate: empty database");
    if (k < 1 || static_cast<std::size_t>(k) > db.size()) {
        throw std::invalid_argument("knn_wknn_estimate: k out of range");
    }
    const std::vector<double> scores = fingerprint_scores(query, db, metric);
    std::vector<int> order(db.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    order.resize(static_cast<std::size_t>(k));

    PositionEstimate est;
    est.contributing_aps = order;  // reference-point indices for fingerprints
    est.per_ap_joint.reserve(order.size());
    for (int i : order) est.per_ap_joint.push_back(scores[i]);

    if (weighted) {
        double total = 0.0;
        for (double s : est.per_ap_joint) total += s;
        if (total <= 0.0) {
            est.weights.assign(order.size(), 1.0 / k);
        } else {
            for (double s : est.per_ap_joint) est.weights.push_back(s / total);
        }
    } else {
        est.weights.assign(order.size(), 1.0 / k);
    }

    double x = 0.0;
    double y = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        x += est.weights[i] * db.points[order[i]].x;
        y += est.weights[i] * db.points[order[i]].y;
    }
    est.xy = {x, y};
    return est;
}

double rmse(const std::vector<Vec2>& actual, const std::vector<Vec2>& estimated) {
    if (actual.size() != estimated.size()) throw std::invalid_argument("rmse: length mismatch");
    if (actual.empty()) throw std::invalid_argument("rmse: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double dx = estimated[i].x - actual[i].x;
        const double dy = estimated[i].y - actual[i].y;
        acc += dx * dx + dy * dy;
    }
    return std::sqrt(acc / static_cast<double>(actual.size()));
}

std::vector<std::pair<double, double>> cdf_curve(std::vector<double> errors) {
    if (errors.empty()) throw std::invalid_argument("cdf_curve: empty input");
    std::sort(errors.begin(), errors.end());
    const auto n = static_cast<double>(errors.size());
    std::vector<std::pair<double, double>> curve;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        const double fraction = static_cast<double>(i + 1) / n;
        if (!curve.empty() && curve.back().first == errors[i]) {
            curve.back().second = fraction;  // duplicates keep the larger fraction
        } else {
            curve.emplace_back(errors[i], fraction);
        }
    }
    return curve;
}

}  // namespace cfpos
