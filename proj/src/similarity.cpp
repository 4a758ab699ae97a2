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

#include "cfpos/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cfpos {

namespace {

double clamp_unit(double v) {
    // Dot/norm rounding can push an exact match a few ulps past 1.
    if (v < 0.0 && v > -1e-9) return 0.0;
    if (v > 1.0 && v < 1.0 + 1e-9) return 1.0;
    return v;
}

}  // namespace

AngleSimilarity angle_similarity(const MatrixXd& theta_actual, const MatrixXd& theta_hyp,
                                 const std::vector<int>& subset, AngleAggregate mode) {
    if (subset.empty()) throw std::invalid_argument("angle_similarity: empty subset");
    if (theta_actual.rows() != theta_hyp.rows() || theta_actual.cols() != theta_hyp.cols()) {
        throw std::invalid_argument("angle_similarity: shape mismatch");
    }
    AngleSimilarity result;
    result.per_ap.reserve(subset.size());
    double sum = 0.0;
    for (int m : subset) {
        if (m < 0 || m >= theta_actual.cols()) {
            throw std::invalid_argument("angle_similarity: AP index " + std::to_string(m) +
                                        " out of range");
        }
        const double na = theta_actual.col(m).norm();
        const double nh = theta_hyp.col(m).norm();
        if (na == 0.0 || nh == 0.0) {
            throw std::invalid_argument("angle_similarity: zero-norm angular column for AP " +
                                        std::to_string(m));
        }
        const double cosine = clamp_unit(theta_actual.col(m).dot(theta_hyp.col(m)) / (na * nh));
        result.per_ap.push_back(cosine);
        sum += cosine;
    }
    const auto size = static_cast<double>(subset.size());
    result.aggregate = mode == AngleAggregate::as_written ? sum / std::sqrt(size) : sum / size;
    return result;
}

double distance_dissimilarity(const VectorXd& psi_actual, const VectorXd& psi_hyp,
                              const std::vector<int>& subset) {
    if (subset.empty()) throw std::invalid_argument("distance_dissimilarity: empty subset");
    double acc = 0.0;
    for (int m : subset) {
        if (m < 0 || m >= psi_actual.size() || m >= psi_hyp.size()) {
            throw std::invalid_argument("distance_dissimilarity: AP index out of range");
        }
        const double diff = psi_actual(m) - psi_hyp(m);
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

std::vector<double> normalize_dissimilarity(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("normalize_dissimilarity: empty input");
    const double maximum = *std::max_element(values.begin(), values.end());
    if (maximum <= 0.0) {
        throw std::invalid_argument("normalize_dissimilarity: all-zero input is degenerate");
    }
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / maximum;
    return out;
}

double joint_similarity(double distance_normalized, double angle) {
    const double d = clamp_unit(distance_normalized);
    const double a = clamp_unit(angle);
    if (d < 0.0 || d > 1.0) {
        throw std::invalid_argument("joint_similarity: normalized distance outside [0, 1]");
    }
    if (a < 0.0 || a > 1.0) {
        throw std::invalid_argument("joint_similarity: angle similarity outside [0, 1]");
    }
    const double value = 1.0 / ((d + kSimilarityEpsilon) * (1.0 - a + kSimilarityEpsilon));
    return std::min(value, kJointCap);
}

std::vector<int> select_evaluation_subset(const std::vector<double>& per_ap_joint,
                                          int subset_size, SubsetScheme scheme,
                                          const std::vector<double>& ap_distances,
                                          double threshold) {
    const auto ap_count = static_cast<int>(per_ap_joint.size());
    if (scheme != SubsetScheme::threshold &&
        (subset_size < 1 || subset_size > ap_count)) {
        throw std::invalid_argument("select_evaluation_subset: subset size out of range");
    }
    std::vector<int> order(per_ap_joint.size());
    std::iota(order.begin(), order.end(), 0);

    switch (scheme) {
        case SubsetScheme::highest_similarity: {
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                if (per_ap_joint[a] != per_ap_joint[b]) return per_ap_joint[a] > per_ap_joint[b];
                return a < b;
            });
            order.resize(static_cast<std::size_t>(subset_size));
            return order;
        }
        case SubsetScheme::closest_distance: {
            if (ap_distances.size() != per_ap_joint.size()) {
                throw std::invalid_argument(
                    "select_evaluation_subset: closest_distance needs one distance per AP");
            }
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                if (ap_distances[a] != ap_distances[b]) return ap_distances[a] < ap_distances[b];
                return a < b;
            });
            order.resize(static_cast<std::size_t>(subset_size));
            return order;
        }
        case SubsetScheme::threshold: {
            std::vector<int> passing;
            for (int m : order) {
                if (per_ap_joint[m] >= threshold) passing.push_back(m);
            }
            std::stable_sort(passing.begin(), passing.end(), [&](int a, int b) {
                if (per_ap_joint[a] != per_ap_joint[b]) return per_ap_joint[a] > per_ap_joint[b];
                return a < b;
            });
            return passing;
        }
    }
    return order;
}

std::vector<double> per_ap_joint_coefficients(const FeatureSet& actual,
                                              const FeatureSet& hypothesis) {
    const auto ap_count = static_cast<int>(actual.rss.size());
    if (hypothesis.rss.size() != ap_count) {
        throw std::invalid_argument("per_ap_joint_coefficients: AP count mismatch");
    }
    std::vector<double> gaps(static_cast<std::size_t>(ap_count));
    for (int m = 0; m < ap_count; ++m) gaps[m] = std::fabs(actual.rss(m) - hypothesis.rss(m));
    const double maximum = *std::max_element(gaps.begin(), gaps.end());

    std::vector<double> joints(static_cast<std::size_t>(ap_count));
    for (int m = 0; m < ap_count; ++m) {
        const double dbar = maximum > 0.0 ? gaps[m] / maximum : 0.0;
        const AngleSimilarity angle =
            angle_similarity(actual.angular, hypothesis.angular, {m}, AngleAggregate::normalized);
        joints[m] = joint_similarity(dbar, angle.aggregate);
    }
    return joints;
}

SimilarityReport evaluate_similarity(const FeatureSet& actual, const FeatureSet& hypothesis,
                                     const std::vector<int>& subset, double normalizer,
                                     AngleAggregate mode) {
    SimilarityReport report;
    report.subset = subset;
    report.mode = mode;
    const AngleSimilarity angle = angle_similarity(actual.angular, hypothesis.angular, subset, mode);
    report.per_ap_angle = angle.per_ap;
    report.aggregate_angle = angle.aggregate;
    report.distance_raw = distance_dissimilarity(actual.rss, hypothesis.rss, subset);
    report.distance_normalized = normalizer > 0.0 ? report.distance_raw / normalizer : 0.0;

    const AngleSimilarity norm_angle =
        mode == AngleAggregate::normalized
            ? angle
            : angle_similarity(actual.angular, hypothesis.angular, subset,
                               AngleAggregate::normalized);
    report.joint = joint_similarity(report.distance_normalized, norm_angle.aggregate);

    report.per_ap_joint.reserve(subset.size());
    std::vector<double> gaps;
    gaps.reserve(subset.size());
    for (int m : subset) gaps.push_back(std::fabs(actual.rss(m) - hypothesis.rss(m)));
    const double max_gap = gaps.empty() ? 0.0 : *std::max_element(gaps.begin(), gaps.end());
    for (std::size_t i = 0; i < subset.size(); ++i) {
        const double dbar = max_gap > 0.0 ? gaps[i] / max_gap : 0.0;
        report.per_ap_joint.push_back(joint_similarity(dbar, angle.per_ap[i]));
    }
    return report;
}

std::size_t SimilarityGrid::argmax_joint() const {
    return static_cast<std::size_t>(
        std::max_element(joint.begin(), joint.end()) - joint.begin());
}

std::size_t SimilarityGrid::argmin_distance() const {
    return static_cast<std::size_t>(
        std::min_element(distance_normalized.begin(), distance_normalized.end()) -
        distance_normalized.begin());
}

SimilarityGrid similarity_grid(const FeatureGenerator& generator, Vec2 actual_position,
                               Vec2 center, double spacing, int per_side, AngleAggregate mode) {
    if (per_side < 2) throw std::invalid_argument("similarity_grid: per_side must be >= 2");
    if (spacing <= 0.0) throw std::invalid_argument("similarity_grid: spacing must be positive");
    const auto& cfg = generator.scenario().config();
    const double cell = generator.options().cell_size;
    const double span = (per_side - 1) * spacing;
    if (span + cell > cfg.area_side) {
        throw std::invalid_argument("similarity_grid: grid exceeds the deployment area");
    }
    // Snap the origin to a feature cell center and keep the grid inside.
    auto snap_origin = [&](double c) {
        double origin = (std::floor((c - span / 2.0) / cell)) * cell + cell / 2.0;
        origin = std::max(origin, cell / 2.0);
        origin = std::min(origin, cfg.area_side - span - cell / 2.0);
        return origin;
    };
    const double x0 = snap_origin(center.x);
    const double y0 = snap_origin(center.y);

    const FeatureSet actual = generator.hypothesis(actual_position);
    std::vector<int> all_aps(static_cast<std::size_t>(cfg.ap_count));
    for (int m = 0; m < cfg.ap_count; ++m) all_aps[m] = m;

    SimilarityGrid grid;
    grid.per_side = per_side;
    grid.spacing = spacing;
    const std::size_t total = static_cast<std::size_t>(per_side) * per_side;
    grid.x.reserve(total);
    grid.y.reserve(total);
    grid.angle.reserve(total);
    grid.joint.reserve(total);
    std::vector<double> raw_distance;
    raw_distance.reserve(total);
    for (int i = 0; i < per_side; ++i) {
        for (int j = 0; j < per_side; ++j) {
            const Vec2 p{x0 + i * spacing, y0 + j * spacing};
            const FeatureSet hyp = generator.hypothesis(p);
            grid.x.push_back(p.x);
            grid.y.push_back(p.y);
            raw_distance.push_back(distance_dissimilarity(actual.rss, hyp.rss, all_aps));
            grid.angle.push_back(angle_similarity(actual.angular, hyp.angular, all_aps, mode).aggregate);
        }
    }
    const double max_distance = *std::max_element(raw_distance.begin(), raw_distance.end());
    grid.distance_normalized.resize(total);
    grid.joint.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        grid.distance_normalized[i] = max_distance > 0.0 ? raw_distance[i] / max_distance : 0.0;
        const double a = mode == AngleAggregate::normalized
                             ? grid.angle[i]
                             : std::min(grid.angle[i], 1.0);
        grid.joint[i] = joint_similarity(grid.distance_normalized[i], a);
    }
    return grid;
}

}  // namespace cfpos
