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

#include <vector>

#include "cfpos/features.hpp"

namespace cfpos {

/// Regularizer and cap for the joint coefficient, whose bare reciprocal form
/// diverges at a perfect match.
inline constexpr double kSimilarityEpsilon = 1e-6;
inline constexpr double kJointCap = 1.0 / (kSimilarityEpsilon * kSimilarityEpsilon);

/// Aggregation of per-AP angle cosines over a subset of size S:
/// as_written divides by sqrt(S) (can exceed 1), normalized divides by S.
enum class AngleAggregate { as_written, normalized };

struct AngleSimilarity {
    double aggregate = 0.0;
    std::vector<double> per_ap;  // cosine per subset member, in [0, 1]
};

/// Cosine similarity between the angular power columns of the two feature
/// matrices, per subset AP, plus the aggregate. Throws when a selected column
/// has zero norm (the message names the offending AP).
AngleSimilarity angle_similarity(const MatrixXd& theta_actual, const MatrixXd& theta_hyp,
                                 const std::vector<int>& subset,
                                 AngleAggregate mode = AngleAggregate::normalized);

/// Euclidean RSS distance over the subset entries.
double distance_dissimilarity(const VectorXd& psi_actual, const VectorXd& psi_hyp,
                              const std::vector<int>& subset);

/// Divides by the maximum over the candidate collection so the largest value
/// maps to exactly 1. All-zero input is rejected as degenerate.
std::vector<double> normalize_dissimilarity(const std::vector<double>& values);

/// Joint angle-distance coefficient 1 / ((d + eps)(1 - a + eps)), capped.
/// Both inputs must lie in [0, 1] (angle in normalized mode).
double joint_similarity(double distance_normalized, double angle_similarity);

enum class SubsetScheme { highest_similarity, closest_distance, threshold };

/// Ordered evaluation subset over M APs. highest_similarity takes the top
/// subset_size coefficients (descending, ties by ascending AP index);
/// closest_distance takes the subset_size smallest ap_distances; threshold
/// keeps every AP with coefficient >= threshold regardless of subset_size.
std::vector<int> select_evaluation_subset(const std::vector<double>& per_ap_joint,
                                          int subset_size, SubsetScheme scheme,
                                          const std::vector<double>& ap_distances = {},
                                          double threshold = 0.0);

/// Per-AP joint coefficients of one hypothesis against measured features:
/// single-AP RSS gaps normalized across APs, combined with per-AP angle
/// cosines. An all-zero RSS gap profile yields zero normalized distances.
std::vector<double> per_ap_joint_coefficients(const FeatureSet& actual,
                                              const FeatureSet& hypothesis);

/// Similarity scores of one hypothesis over an evaluation subset.
struct SimilarityReport {
    std::vector<double> per_ap_angle;
    std::vector<double> per_ap_joint;
    double aggregate_angle = 0.0;
    double distance_raw = 0.0;
    double distance_normalized = 0.0;
    double joint = 0.0;
    std::vector<int> subset;
    AngleAggregate mode = AngleAggregate::normalized;
};

/// Assembles the full report for a hypothesis. distance_normalized is the raw
/// subset distance divided by `normalizer` (the caller chooses the candidate
/// population the maximum was taken over); pass 0 for a degenerate all-zero
/// population, which maps the distance to 0.
SimilarityReport evaluate_similarity(const FeatureSet& actual, const FeatureSet& hypothesis,
                                     const std::vector<int>& subset, double normalizer,
                                     AngleAggregate mode = AngleAggregate::normalized);

/// Similarity landscape sampled on a square hypothesis grid. Distances are
/// normalized over the grid population.
struct SimilarityGrid {
    int per_side = 0;
    double spacing = 0.0;
    std::vector<double> x, y;
    std::vector<double> angle;
    std::vector<double> distance_normalized;
    std::vector<double> joint;

    std::size_t size() const { return x.size(); }
    std::size_t argmax_joint() const;
    std::size_t argmin_distance() const;
};

/// Evaluates the similarity of every grid point against the features at
/// `actual_position`. The grid is centered near `center`, snapped to feature
/// cell centers and clipped so all points stay inside the area.
SimilarityGrid similarity_grid(const FeatureGenerator& generator, Vec2 actual_position,
                               Vec2 center, double spacing, int per_side,
                               AngleAggregate mode = AngleAggregate::normalized);

}  // namespace cfpos
