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

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "cfpos/harness.hpp"

namespace fs = std::filesystem;
using namespace cfpos;

namespace {

struct CommonSpecArgs {
    std::string spec_file;
    std::string config_file;
    std::string method;
    std::string metric;
    std::string estimation;
    std::string seeds;
    std::string output_dir;
    int k_neighbors = -1;
    double eta = -1.0;
    int episodes = -1;
    int steps = -1;
    int subset_size = -1;
    int realizations = -1;
};

void add_spec_flags(CLI::App* cmd, CommonSpecArgs& args) {
    cmd->add_option("--spec", args.spec_file, "Experiment spec file (key = value)");
    cmd->add_option("--config", args.config_file, "Scenario config file (key = value)");
    cmd->add_option("--method", args.method,
                    "jpc_maddpg|fingerprint_basic|fingerprint_knn|fingerprint_wknn|random_baseline");
    cmd->add_option("--metric", args.metric, "rss|aoa|joint");
    cmd->add_option("--estimation", args.estimation, "basic|knn|wknn|cowknn");
    cmd->add_option("--seeds", args.seeds, "Comma-separated seed list");
    cmd->add_option("--out", args.output_dir, "Output directory");
    cmd->add_option("--k", args.k_neighbors, "Neighbors for KNN/WKNN estimation");
    cmd->add_option("--eta", args.eta, "Fingerprint reference spacing, meters");
    cmd->add_option("--episodes", args.episodes, "Training episodes");
    cmd->add_option("--steps", args.steps, "Interaction steps per episode");
    cmd->add_option("--subset-size", args.subset_size, "Evaluation subset size L_k (0 = all APs)");
    cmd->add_option("--realizations", args.realizations, "Fading draws per angular column");
}

/// File values first, then command-line overrides.
ExperimentSpec resolve_spec(const CommonSpecArgs& args) {
    ExperimentSpec spec;
    if (!args.spec_file.empty()) {
        spec = load_experiment_spec(args.spec_file);
    } else if (!args.config_file.empty()) {
        spec.scenario = io::load_scenario_config(args.config_file);
        spec.seeds = {spec.scenario.seed};
    } else {
        spec.seeds = {spec.scenario.seed};
    }
    if (!args.method.empty()) {
        spec.method = method_from_string(args.method);
        if (args.estimation.empty()) {
            switch (spec.method) {
                case Method::jpc_maddpg: spec.estimation = Estimation::cowknn; break;
                case Method::fingerprint_basic: spec.estimation = Estimation::basic; break;
                case Method::fingerprint_knn: spec.estimation = Estimation::knn; break;
                case Method::fingerprint_wknn:
                case Method::random_baseline: spec.estimation = Estimation::wknn; break;
            }
        }
    }
    if (!args.metric.empty()) spec.metric = metric_from_string(args.metric);
    if (!args.estimation.empty()) spec.estimation = estimation_from_string(args.estimation);
    if (!args.seeds.empty()) {
        spec.seeds.clear();
        std::istringstream in(args.seeds);
        std::string token;
        while (std::getline(in, token, ',')) {
            if (!token.empty()) spec.seeds.push_back(std::stoull(token));
        }
    }
    if (!args.output_dir.empty()) spec.output_dir = args.output_dir;
    if (spec.output_dir.empty()) spec.output_dir = default_output_root();
    if (args.k_neighbors >= 0) spec.k_neighbors = args.k_neighbors;
    if (args.eta >= 0.0) spec.eta = args.eta;
    if (args.episodes >= 0) spec.training.episodes = args.episodes;
    if (args.steps >= 0) spec.training.steps_per_episode = args.steps;
    if (args.subset_size >= 0) spec.subset_size = args.subset_size;
    if (args.realizations >= 0) spec.feature_realizations = args.realizations;
    return spec;
}

void print_summary(const ExperimentSummary& summary) {
    std::cout << "method=" << method_to_string(summary.spec.method)
              << " seeds=" << summary.results.size()
              << " mean_rmse=" << io::format_double(summary.mean_rmse)
              << " median_rmse=" << io::format_double(summary.median_rmse) << "\n";
    for (const auto& r : summary.results) {
        std::cout << "  seed " << r.seed << ": rmse=" << io::format_double(r.report.rmse) << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cfpos: cooperative positioning experiments for cell-free massive MIMO"};
    app.require_subcommand(1);

    // scenario
    std::string sc_config;
    std::uint64_t sc_seed = 1;
    bool sc_seed_set = false;
    std::string sc_out;
    auto* sc = app.add_subcommand("scenario", "Build a scenario and write its JSON document");
    sc->add_option("--config", sc_config, "Scenario config file");
    sc->add_option("--seed", sc_seed, "Scenario seed")->each([&](const std::string&) {
        sc_seed_set = true;
    });
    sc->add_option("--out", sc_out, "Output JSON path");

    // train
    CommonSpecArgs train_args;
    auto* train = app.add_subcommand("train", "Train JPC agents and evaluate Co-WKNN estimates");
    add_spec_flags(train, train_args);

    // fingerprint
    std::string fp_config;
    std::uint64_t fp_seed = 1;
    double fp_eta = 2.5;
    int fp_realizations = 200;
    std::string fp_out;
    auto* fp = app.add_subcommand("fingerprint", "Build and persist a fingerprint database");
    fp->add_option("--config", fp_config, "Scenario config file");
    fp->add_option("--seed", fp_seed, "Scenario seed");
    fp->add_option("--eta", fp_eta, "Reference point spacing, meters");
    fp->add_option("--realizations", fp_realizations, "Fading draws per angular column");
    fp->add_option("--out", fp_out, "Output directory");

    // evaluate
    CommonSpecArgs eval_args;
    auto* eval = app.add_subcommand("evaluate", "Run an experiment spec across seeds");
    add_spec_flags(eval, eval_args);

    // sweep
    CommonSpecArgs sweep_args;
    std::string sweep_vary = "ap_count";
    std::string sweep_values;
    auto* sweep = app.add_subcommand("sweep", "Repeat an experiment over a parameter grid");
    add_spec_flags(sweep, sweep_args);
    sweep->add_option("--vary", sweep_vary, "ap_count|antennas_per_ap|paths_per_link|eta");
    sweep->add_option("--values", sweep_values, "Comma-separated values")->required();

    // plot-data
    std::string plot_run;
    std::string plot_out;
    int plot_heatgrid_ue = -1;
    int plot_heatgrid_side = 50;
    auto* plot = app.add_subcommand("plot-data", "Export figure CSVs from a persisted run");
    plot->add_option("--run", plot_run, "Experiment output directory")->required();
    plot->add_option("--out", plot_out, "Destination directory (defaults to the run directory)");
    plot->add_option("--heatgrid-ue", plot_heatgrid_ue,
                     "Also emit heatgrid.csv: similarity landscape around this UE (first seed)");
    plot->add_option("--heatgrid-side", plot_heatgrid_side, "Heat grid points per side");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sc->parsed()) {
            ScenarioConfig cfg =
                sc_config.empty() ? ScenarioConfig{} : io::load_scenario_config(sc_config);
            if (sc_seed_set) cfg.seed = sc_seed;
            const Scenario scenario = Scenario::build(cfg);
            const std::string out = sc_out.empty()
                                        ? (fs::path(default_output_root()) / "scenario.json").string()
                                        : sc_out;
            io::save_scenario(scenario, out);
            std::cout << "wrote " << out << " (M=" << cfg.ap_count << ", K=" << cfg.ue_count
                      << ", noise=" << io::format_double(watt_to_dbm(scenario.noise_power_w()))
                      << " dBm)\n";
        } else if (train->parsed()) {
            ExperimentSpec spec = resolve_spec(train_args);
            spec.method = Method::jpc_maddpg;
            spec.estimation = Estimation::cowknn;
            print_summary(run_experiment(spec));
        } else if (fp->parsed()) {
            ScenarioConfig cfg =
                fp_config.empty() ? ScenarioConfig{} : io::load_scenario_config(fp_config);
            cfg.seed = fp_seed;
            const Scenario scenario = Scenario::build(cfg);
            FeatureOptions opts;
            opts.realizations = fp_realizations;
            const FeatureGenerator gen(scenario, opts);
            const FingerprintDb db = build_fingerprint_db(gen, fp_eta);
            const std::string out =
                fp_out.empty() ? (fs::path(default_output_root()) / "fingerprint").string() : fp_out;
            io::save_fingerprint_db(db, out);
            std::cout << "wrote " << db.size() << " reference points to " << out << "\n";
        } else if (eval->parsed()) {
            print_summary(run_experiment(resolve_spec(eval_args)));
        } else if (sweep->parsed()) {
            const ExperimentSpec base = resolve_spec(sweep_args);
            std::vector<double> values;
            {
                std::istringstream in(sweep_values);
                std::string token;
                while (std::getline(in, token, ',')) {
                    if (!token.empty()) values.push_back(std::stod(token));
                }
            }
            if (values.empty()) throw std::invalid_argument("sweep: no values given");
            std::vector<SweepPoint> points;
            for (double value : values) {
                ExperimentSpec spec = base;
                if (sweep_vary == "ap_count") spec.scenario.ap_count = static_cast<int>(value);
                else if (sweep_vary == "antennas_per_ap")
                    spec.scenario.antennas_per_ap = static_cast<int>(value);
                else if (sweep_vary == "paths_per_link")
                    spec.scenario.paths_per_link = static_cast<int>(value);
                else if (sweep_vary == "eta") spec.eta = value;
                else throw std::invalid_argument("sweep: unknown axis '" + sweep_vary + "'");
                spec.output_dir = (fs::path(base.output_dir) /
                                   (sweep_vary + "_" + io::format_double(value)))
                                      .string();
                points.push_back({value, run_experiment(spec)});
                std::cout << sweep_vary << "=" << io::format_double(value)
                          << " median_rmse=" << io::format_double(points.back().summary.median_rmse)
                          << "\n";
            }
            std::string axis = "value";
            if (sweep_vary == "ap_count") axis = "M";
            else if (sweep_vary == "antennas_per_ap") axis = "N";
            else if (sweep_vary == "paths_per_link") axis = "L";
            else if (sweep_vary == "eta") axis = "eta";
            emit_sweep_csv(axis, points,
                           (fs::path(base.output_dir) / ("rmse_vs_" + axis + ".csv")).string());
        } else if (plot->parsed()) {
            const ExperimentSummary summary = load_experiment_summary(plot_run);
            const std::string out = plot_out.empty() ? plot_run : plot_out;
            emit_plot_data(summary, out);
            if (plot_heatgrid_ue >= 0 && !summary.results.empty()) {
                ScenarioConfig cfg = io::scenario_config_from_json(
                    summary.results.front().report.config_echo);
                const Scenario scenario = Scenario::build(cfg);
                const FeatureGenerator gen(scenario, {});
                const Vec2 ue = scenario.placement().ue_xy.at(plot_heatgrid_ue);
                const SimilarityGrid grid =
                    similarity_grid(gen, ue, ue, 1.0, plot_heatgrid_side);
                io::save_similarity_grid_csv(grid, (fs::path(out) / "heatgrid.csv").string());
            }
            std::cout << "wrote plot CSVs for " << summary.results.size() << " seeds\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
