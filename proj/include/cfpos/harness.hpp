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
#include <string>
#include <vector>

#include "cfpos/io.hpp"

namespace cfpos {

enum class Method {
    jpc_maddpg,
    fingerprint_basic,
    fingerprint_knn,
    fingerprint_wknn,
    random_baseline
};

enum class Estimation { basic, knn, wknn, cowknn };

std::string method_to_string(Method m);
Method method_from_string(const std::string& s);
std::string estimation_to_string(Estimation e);
Estimation estimation_from_string(const std::string& s);
std::string metric_to_string(FingerprintMetric m);
FingerprintMetric metric_from_string(const std::string& s);

/// One reproducible experiment: scenario template, method, estimation knobs
/// and the seed list. Each seed stamps the scenario config before building.
struct ExperimentSpec {
    ScenarioConfig scenario;
    Method method = Method::fingerprint_wknn;
    FingerprintMetric metric = FingerprintMetric::joint;
    Estimation estimation = Estimation::wknn;
    int k_neighbors = 4;
    double eta = 2.5;
    SubsetScheme subset_scheme = SubsetScheme::highest_similarity;
    int subset_size = 0;  // L_k, 0 selects all APs
    int feature_realizations = 200;
    JpcHyper training;
    std::string output_dir;
    std::vector<std::uint64_t> seeds;

    /// Rejects invalid field combinations, naming the offending field.
    void validate() const;
};

struct SeedResult {
    std::uint64_t seed = 0;
    io::EvalReport report;
    TrainingLog training_log;  // empty unless the method trains
    std::string directory;    // per-seed artifact directory (may be empty)
};

struct ExperimentSummary {
    ExperimentSpec spec;
    std::vector<SeedResult> results;
    double mean_rmse = 0.0;
    double median_rmse = 0.0;
};

/// Runs every seed sequentially, persisting one directory per (method, seed)
/// with manifest.json, report.json/csv and, for trained methods, the training
/// log and policy. A summary pair (json + csv) lands in the output root.
/// With an empty output_dir nothing is written.
ExperimentSummary run_experiment(const ExperimentSpec& spec);

/// Spec parsing: flat key/value file sharing the scenario keys plus
/// experiment fields (method, metric, estimation, k_neighbors, eta, seeds,
/// episodes, steps_per_episode, output_dir, ...); explicit overrides win.
ExperimentSpec experiment_spec_from_map(std::map<std::string, std::string> kv);
ExperimentSpec load_experiment_spec(const std::string& path);
nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec);

/// Default output root: $CFPOS_OUTPUT_ROOT or "./cfpos_out".
std::string default_output_root();

/// Reloads a persisted experiment tree (summary.json plus per-seed dirs).
ExperimentSummary load_experiment_summary(const std::string& output_dir);

/// Figure-family CSV exports from persisted results.
void emit_plot_data(const ExperimentSummary& summary, const std::string& out_dir);

/// One sweep sample: the swept value and the seeds' summary at that value.
struct SweepPoint {
    double value = 0.0;
    ExperimentSummary summary;
};

/// rmse_vs_<axis>.csv with one row per (value, seed).
void emit_sweep_csv(const std::string& axis, const std::vector<SweepPoint>& points,
                    const std::string& path);

}  // namespace cfpos
