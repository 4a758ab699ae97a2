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

#include "cfpos/harness.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sstream>

namespace cfpos {

namespace fs = std::filesystem;
using nlohmann::json;

std::string method_to_string(Method m) {
    switch (m) {
        case Method::jpc_maddpg: return "jpc_maddpg";
        case Method::fingerprint_basic: return "fingerprint_basic";
        case Method::fingerprint_knn: return "fingerprint_knn";
        case Method::fingerprint_wknn: return "fingerprint_wknn";
        case Method::random_baseline: return "random_baseline";
    }
    return "unknown";
}

Method method_from_string(const std::string& s) {
    if (s == "jpc_maddpg") return Method::jpc_maddpg;
    if (s == "fingerprint_basic") return Method::fingerprint_basic;
    if (s == "fingerprint_knn") return Method::fingerprint_knn;
    if (s == "fingerprint_wknn") return Method::fingerprint_wknn;
    if (s == "random_baseline") return Method::random_baseline;
    throw std::invalid_argument("spec: unknown method '" + s + "'");
}

std::string estimation_to_string(Estimation e) {
    switch (e) {
        case Estimation::basic: return "basic";
        case Estimation::knn: return "knn";
        case Estimation::wknn: return "wknn";
        case Estimation::cowknn: return "cowknn";
    }
    return "unknown";
}

Estimation estimation_from_string(const std::string& s) {
    if (s == "basic") return Estimation::basic;
    if (s == "knn") return Estimation::knn;
    if (s == "wknn") return Estimation::wknn;
    if (s == "cowknn") return Estimation::cowknn;
    throw std::invalid_argument("spec: unknown estimation '" + s + "'");
}

std::string metric_to_string(FingerprintMetric m) {
    switch (m) {
        case FingerprintMetric::rss: return "rss";
        case FingerprintMetric::aoa: return "aoa";
        case FingerprintMetric::joint: return "joint";
    }
    return "unknown";
}

FingerprintMetric metric_from_string(const std::string& s) {
    if (s == "rss") return FingerprintMetric::rss;
    if (s == "aoa") return FingerprintMetric::aoa;
    if (s == "joint") return FingerprintMetric::joint;
    throw std::invalid_argument("spec: unknown metric '" + s + "'");
}

void ExperimentSpec::validate() const {
    scenario.validate();
    if (seeds.empty()) throw std::invalid_argument("spec: field 'seeds' must be nonempty");
    if (k_neighbors < 1) throw std::invalid_argument("spec: field 'k_neighbors' must be >= 1");
    if (eta <= 0.0 || eta > scenario.area_side) {
        throw std::invalid_argument("spec: field 'eta' must lie in (0, area_side]");
    }
    const auto require = [&](Estimation expected, const char* name) {
        if (estimation != expected) {
            throw std::invalid_argument(std::string("spec: field 'estimation' must be '") +
                                        estimation_to_string(expected) + "' for method '" + name +
                                        "'");
        }
    };
    switch (method) {
        case Method::jpc_maddpg: require(Estimation::cowknn, "jpc_maddpg"); break;
        case Method::fingerprint_basic: require(Estimation::basic, "fingerprint_basic"); break;
        case Method::fingerprint_knn: require(Estimation::knn, "fingerprint_knn"); break;
        case Method::fingerprint_wknn: require(Estimation::wknn, "fingerprint_wknn"); break;
        case Method::random_baseline: break;
    }
    if (subset_size < 0 || subset_size > scenario.ap_count) {
        throw std::invalid_argument("spec: field 'subset_size' out of range");
    }
    if (feature_realizations < 1) {
        throw std::invalid_argument("spec: field 'feature_realizations' must be >= 1");
    }
}

namespace {

io::EvalReport make_report(const std::string& method, std::uint64_t seed,
                           const ScenarioConfig& cfg, const std::vector<Vec2>& actual,
                           const std::vector<Vec2>& estimated) {
    io::EvalReport report;
    report.method = method;
    report.seed = seed;
    report.config_echo = io::scenario_config_to_json(cfg);
    report.actual = actual;
    report.estimated = estimated;
    report.per_ue_error.reserve(actual.size());
    for (std::size_t k = 0; k < actual.size(); ++k) {
        const double dx = estimated[k].x - actual[k].x;
        const double dy = estimated[k].y - actual[k].y;
        report.per_ue_error.push_back(std::sqrt(dx * dx + dy * dy));
    }
    report.rmse = rmse(actual, estimated);
    report.cdf = cdf_curve(report.per_ue_error);
    return report;
}

SeedResult run_seed(const ExperimentSpec& spec, std::uint64_t seed) {
    ScenarioConfig cfg = spec.scenario;
    cfg.seed = seed;
    const Scenario scenario = Scenario::build(cfg);
    const std::string method = method_to_string(spec.method);

    SeedResult result;
    result.seed = seed;
    switch (spec.method) {
        case Method::random_baseline: {
            RandomStream rng = RandomStream(seed).substream(stream_tag::kBaseline);
            std::vector<Vec2> estimates(static_cast<std::size_t>(cfg.ue_count));
            for (auto& p : estimates) {
                p.x = rng.uniform(0.0, cfg.area_side);
                p.y = rng.uniform(0.0, cfg.area_side);
            }
            result.report =
                make_report(method, seed, cfg, scenario.placement().ue_xy, estimates);
            break;
        }
        case Method::fingerprint_basic:
        case Method::fingerprint_knn:
        case Method::fingerprint_wknn: {
            FeatureOptions opts;
            opts.realizations = spec.feature_realizations;
            const FeatureGenerator gen(scenario, opts);
            const FingerprintDb db = build_fingerprint_db(gen, spec.eta);
            const bool weighted = spec.method == Method::fingerprint_wknn;
            const int k = spec.method == Method::fingerprint_basic ? 1 : spec.k_neighbors;
            std::vector<Vec2> estimates;
            estimates.reserve(static_cast<std::size_t>(cfg.ue_count));
            for (int ue = 0; ue < cfg.ue_count; ++ue) {
                const FeatureSet query = gen.measured(ue);
                estimates.push_back(knn_wknn_estimate(query, db, k, weighted, spec.metric).xy);
            }
            result.report =
                make_report(method, seed, cfg, scenario.placement().ue_xy, estimates);
            break;
        }
        case Method::jpc_maddpg: {
            FeatureOptions opts;
            opts.realizations = spec.feature_realizations;
            const FeatureGenerator gen(scenario, opts);
            JpcHyper hyper = spec.training;
            hyper.eval_subset_size = spec.subset_size;
            const JpcResult trained = train_jpc(scenario, gen, hyper);
            std::vector<Vec2> estimates;
            estimates.reserve(trained.final_estimates.size());
            for (const auto& e : trained.final_estimates) estimates.push_back(e.xy);
            result.report =
                make_report(method, seed, cfg, scenario.placement().ue_xy, estimates);
            result.training_log = trained.log;
            if (!spec.output_dir.empty()) {
                const fs::path dir = fs::path(spec.output_dir) /
                                     (method + "_seed" + std::to_string(seed));
                io::save_policy(trained, (dir / "policy.txt").string());
            }
            break;
        }
    }
    return result;
}

void persist_seed(const ExperimentSpec& spec, SeedResult& result) {
    if (spec.output_dir.empty()) return;
    const std::string method = method_to_string(spec.method);
    const fs::path dir =
        fs::path(spec.output_dir) / (method + "_seed" + std::to_string(result.seed));
    fs::create_directories(dir);
    result.directory = dir.string();

    json manifest;
    manifest["schema_version"] = io::kSchemaVersion;
    manifest["kind"] = "run_manifest";
    manifest["code_version"] = io::kCodeVersion;
    manifest["seed"] = result.seed;
    manifest["spec"] = experiment_spec_to_json(spec);
    io::write_text_file((dir / "manifest.json").string(), manifest.dump(2) + "\n");

    io::save_eval_report(result.report, (dir / "report.json").string(),
                         (dir / "report.csv").string());
    if (!result.training_log.rows.empty()) {
        io::save_training_log_csv(result.training_log, (dir / "training.csv").string());
    }
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    ExperimentSummary summary;
    summary.spec = spec;
    for (const std::uint64_t seed : spec.seeds) {
        try {
            SeedResult result = run_seed(spec, seed);
            persist_seed(spec, result);
            summary.results.push_back(std::move(result));
        } catch (const std::exception& e) {
            // Keep what already finished on disk, then surface the failure.
            throw std::runtime_error("run_experiment: seed " + std::to_string(seed) +
                                     " failed: " + e.what());
        }
    }
    std::vector<double> rmses;
    rmses.reserve(summary.results.size());
    for (const auto& r : summary.results) rmses.push_back(r.report.rmse);
    summary.mean_rmse = 0.0;
    for (double v : rmses) summary.mean_rmse += v;
    summary.mean_rmse /= static_cast<double>(rmses.size());
    std::vector<double> sorted = rmses;
    std::sort(sorted.begin(), sorted.end());
    summary.median_rmse = sorted[(sorted.size() - 1) / 2];

    if (!spec.output_dir.empty()) {
        json adj;
        adj["schema_version"] = io::kSchemaVersion;
        adj["kind"] = "experiment_summary";
        adj["code_version"] = io::kCodeVersion;
        adj["spec"] = experiment_spec_to_json(spec);
        adj["mean_rmse"] = summary.mean_rmse;
        adj["median_rmse"] = summary.median_rmse;
        json per_seed = json::array();
        for (const auto& r : summary.results) {
            per_seed.push_back({{"seed", r.seed}, {"rmse", r.report.rmse}, {"dir", r.directory}});
        }
        adj["seeds"] = per_seed;
        io::write_text_file((fs::path(spec.output_dir) / "summary.json").string(),
                            adj.dump(2) + "\n");
        std::ostringstream csv;
        csv << "seed,rmse\n";
        for (const auto& r : summary.results) {
            csv << r.seed << "," << io::format_double(r.report.rmse) << "\n";
        }
        io::write_text_file((fs::path(spec.output_dir) / "summary.csv").string(), csv.str());
    }
    return summary;
}

ExperimentSpec experiment_spec_from_map(std::map<std::string, std::string> kv) {
    ExperimentSpec spec;
    auto take = [&kv](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string value = it->second;
        kv.erase(it);
        return value;
    };
    if (auto v = take("method")) spec.method = method_from_string(*v);
    if (auto v = take("metric")) spec.metric = metric_from_string(*v);
    if (auto v = take("estimation")) {
        spec.estimation = estimation_from_string(*v);
    } else {
        switch (spec.method) {
            case Method::jpc_maddpg: spec.estimation = Estimation::cowknn; break;
            case Method::fingerprint_basic: spec.estimation = Estimation::basic; break;
            case Method::fingerprint_knn: spec.estimation = Estimation::knn; break;
            case Method::fingerprint_wknn:
            case Method::random_baseline: spec.estimation = Estimation::wknn; break;
        }
    }
    if (auto v = take("k_neighbors")) spec.k_neighbors = std::stoi(*v);
    if (auto v = take("eta")) spec.eta = std::stod(*v);
    if (auto v = take("subset_scheme")) {
        if (*v == "highest_similarity") spec.subset_scheme = SubsetScheme::highest_similarity;
        else if (*v == "closest_distance") spec.subset_scheme = SubsetScheme::closest_distance;
        else if (*v == "threshold") spec.subset_scheme = SubsetScheme::threshold;
        else throw std::invalid_argument("spec: unknown subset_scheme '" + *v + "'");
    }
    if (auto v = take("subset_size")) spec.subset_size = std::stoi(*v);
    if (auto v = take("feature_realizations")) spec.feature_realizations = std::stoi(*v);
    if (auto v = take("episodes")) spec.training.episodes = std::stoi(*v);
    if (auto v = take("steps_per_episode")) spec.training.steps_per_episode = std::stoi(*v);
    if (auto v = take("output_dir")) spec.output_dir = *v;
    if (auto v = take("seeds")) {
        std::istringstream in(*v);
        std::string token;
        while (std::getline(in, token, ',')) {
            if (!token.empty()) spec.seeds.push_back(std::stoull(token));
        }
    }
    spec.scenario = io::scenario_config_from_map(kv);  // remaining keys are scenario keys
    if (spec.seeds.empty()) spec.seeds = {spec.scenario.seed};
    return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    return experiment_spec_from_map(io::parse_key_value_file(path));
}

json experiment_spec_to_json(const ExperimentSpec& spec) {
    json j;
    j["scenario"] = io::scenario_config_to_json(spec.scenario);
    j["method"] = method_to_string(spec.method);
    j["metric"] = metric_to_string(spec.metric);
    j["estimation"] = estimation_to_string(spec.estimation);
    j["k_neighbors"] = spec.k_neighbors;
    j["eta"] = spec.eta;
    j["subset_size"] = spec.subset_size;
    j["feature_realizations"] = spec.feature_realizations;
    j["episodes"] = spec.training.episodes;
    j["steps_per_episode"] = spec.training.steps_per_episode;
    json seeds = json::array();
    for (auto s : spec.seeds) seeds.push_back(s);
    j["seeds"] = seeds;
    return j;
}

std::string default_output_root() {
    if (const char* env = std::getenv("CFPOS_OUTPUT_ROOT")) return env;
    return "cfpos_out";
}

ExperimentSummary load_experiment_summary(const std::string& output_dir) {
    const json j = json::parse(io::read_text_file((fs::path(output_dir) / "summary.json").string()));
    ExperimentSummary summary;
    summary.mean_rmse = j.at("mean_rmse").get<double>();
    summary.median_rmse = j.at("median_rmse").get<double>();
    for (const auto& entry : j.at("seeds")) {
        SeedResult result;
        result.seed = entry.at("seed").get<std::uint64_t>();
        result.directory = entry.at("dir").get<std::string>();
        result.report = io::eval_report_from_json(
            json::parse(io::read_text_file((fs::path(result.directory) / "report.json").string())));
        const fs::path training = fs::path(result.directory) / "training.csv";
        if (fs::exists(training)) {
            result.training_log = io::load_training_log_csv(training.string());
        }
        summary.results.push_back(std::move(result));
    }
    return summary;
}

void emit_plot_data(const ExperimentSummary& summary, const std::string& out_dir) {
    if (summary.results.empty()) {
        throw std::invalid_argument("emit_plot_data: no reports to export");
    }
    fs::create_directories(out_dir);
    {
        std::ostringstream out;
        out << "seed,error,fraction\n";
        for (const auto& r : summary.results) {
            for (const auto& [e, f] : r.report.cdf) {
                out << r.seed << "," << io::format_double(e) << "," << io::format_double(f)
                    << "\n";
            }
        }
        io::write_text_file((fs::path(out_dir) / "cdf.csv").string(), out.str());
    }
    {
        std::ostringstream out;
        out << "seed,episode,mean_reward_p,mean_reward_c,eval_rmse\n";
        for (const auto& r : summary.results) {
            for (const auto& row : r.training_log.rows) {
                out << r.seed << "," << row.episode << "," << io::format_double(row.mean_reward_p)
                    << "," << io::format_double(row.mean_reward_c) << ","
                    << io::format_double(row.eval_rmse) << "\n";
            }
        }
        io::write_text_file((fs::path(out_dir) / "convergence.csv").string(), out.str());
    }
}

void emit_sweep_csv(const std::string& axis, const std::vector<SweepPoint>& points,
                    const std::string& path) {
    if (points.empty()) throw std::invalid_argument("emit_sweep_csv: no sweep points");
    std::ostringstream out;
    out << axis << ",seed,rmse\n";
    for (const auto& point : points) {
        for (const auto& r : point.summary.results) {
            out << io::format_double(point.value) << "," << r.seed << ","
                << io::format_double(r.report.rmse) << "\n";
        }
    }
    io::write_text_file(path, out.str());
}

}  // namespace cfpos
