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

#include <map>
#include <string>

#include <json.hpp>

#include "cfpos/estimate.hpp"
#include "cfpos/jpc.hpp"

namespace cfpos::io {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "cfpos-0.1.0";

/// Round-trip-safe, locale-independent double formatting.
std::string format_double(double v);

/// Flat `key = value` file (# comments, blank lines allowed).
std::map<std::string, std::string> parse_key_value_file(const std::string& path);
std::map<std::string, std::string> parse_key_value_text(const std::string& text);

/// ScenarioConfig from a flat key/value map; unknown keys are rejected by
/// name. Missing keys keep their defaults.
ScenarioConfig scenario_config_from_map(const std::map<std::string, std::string>& kv);
ScenarioConfig load_scenario_config(const std::string& path);

nlohmann::json scenario_config_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_config_from_json(const nlohmann::json& j);

/// Versioned scenario document: config, placements, per-link state, noise.
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);
void save_scenario(const Scenario& scenario, const std::string& path);
Scenario load_scenario(const std::string& path);

/// FeatureSet as CSV: a commented layout header, the RSS row, then the
/// angular matrix row-major (one CSV row per antenna row).
void save_feature_set_csv(const FeatureSet& fs, const std::string& path);

/// Fingerprint database bundle: points.csv and features.csv in `dir`.
void save_fingerprint_db(const FingerprintDb& db, const std::string& dir);
FingerprintDb load_fingerprint_db(const std::string& dir);

void save_training_log_csv(const TrainingLog& log, const std::string& path);
TrainingLog load_training_log_csv(const std::string& path);

/// Trained parameters in a versioned text format: layer sizes followed by
/// row-major weight rows and the bias, layer by layer.
void save_mlp_text(const Mlp& net, std::ostream& out, const std::string& name);
Mlp load_mlp_text(std::istream& in, std::string* name = nullptr);
void save_policy(const JpcResult& result, const std::string& path);

/// Per-UE estimation outcome of one run.
struct EvalReport {
    std::string method;
    std::uint64_t seed = 0;
    nlohmann::json config_echo;
    std::vector<double> per_ue_error;
    double rmse = 0.0;
    std::vector<std::pair<double, double>> cdf;
    std::vector<Vec2> actual;
    std::vector<Vec2> estimated;
};

nlohmann::json eval_report_to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);
void save_eval_report(const EvalReport& report, const std::string& json_path,
                      const std::string& csv_path);

/// Similarity heat grid rows (x, y, angle, normalized distance, joint).
void save_similarity_grid_csv(const SimilarityGrid& grid, const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace cfpos::io
