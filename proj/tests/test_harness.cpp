#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "cfpos/harness.hpp"

using namespace cfpos;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

ScenarioConfig tiny_config() {
    ScenarioConfig cfg;
    cfg.ap_count = 3;
    cfg.ue_count = 2;
    cfg.pilot_length = 2;
    cfg.antennas_per_ap = 2;
    cfg.paths_per_link = 2;
    cfg.seed = 11;
    return cfg;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config file parsing mirrors the scenario fields") {
    const auto kv = io::parse_key_value_text(
        "# comment\narea_side = 200\nap_count=4\nue_count = 2\npilot_length = 2\n"
        "los_mode = probabilistic\nseed = 9\n");
    const ScenarioConfig cfg = io::scenario_config_from_map(kv);
    CHECK(cfg.area_side == 200.0);
    CHECK(cfg.ap_count == 4);
    CHECK(cfg.los_mode == LosMode::probabilistic);
    CHECK(cfg.seed == 9);
    CHECK(cfg.antennas_per_ap == 4);  // untouched default

    CHECK_THROWS_WITH_AS(io::scenario_config_from_map({{"bogus_key", "1"}}),
                         doctest::Contains("bogus_key"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_key_value_text("not a pair\n"), std::invalid_argument);
}

TEST_CASE("scenario json round trip preserves the document byte for byte") {
    const Scenario s = Scenario::build(tiny_config());
    const auto j = io::scenario_to_json(s);
    const Scenario restored = io::scenario_from_json(j);
    CHECK(io::scenario_to_json(restored).dump() == j.dump());
}

TEST_CASE("experiment spec validation names the offending field") {
    ExperimentSpec spec;
    spec.scenario = tiny_config();
    spec.seeds = {1};
    spec.method = Method::jpc_maddpg;
    spec.estimation = Estimation::wknn;
    CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("estimation"), std::invalid_argument);
    spec.estimation = Estimation::cowknn;
    CHECK_NOTHROW(spec.validate());
    spec.seeds.clear();
    CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("seeds"), std::invalid_argument);
    spec.seeds = {1};
    spec.eta = 0.0;
    CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("eta"), std::invalid_argument);
}

TEST_CASE("experiment spec file parsing with scenario keys inline") {
    const auto spec = experiment_spec_from_map(io::parse_key_value_text(
        "method = fingerprint_knn\nmetric = rss\nk_neighbors = 3\neta = 25\n"
        "seeds = 4,5\nap_count = 3\nue_count = 2\npilot_length = 2\n"));
    CHECK(spec.method == Method::fingerprint_knn);
    CHECK(spec.estimation == Estimation::knn);  // derived from the method
    CHECK(spec.metric == FingerprintMetric::rss);
    CHECK(spec.k_neighbors == 3);
    CHECK(spec.eta == 25.0);
    CHECK(spec.seeds == std::vector<std::uint64_t>{4, 5});
    CHECK(spec.scenario.ap_count == 3);
}

TEST_CASE("grid-coincident UEs are recovered exactly by wknn at k = 1") {
    ScenarioConfig cfg = tiny_config();
    const Scenario base = Scenario::build(cfg);
    Placement placement;
    placement.ap_xy = base.placement().ap_xy;
    placement.ue_xy = {{25.0, 50.0}, {75.0, 25.0}};  // multiples of eta = 25
    const Scenario s = Scenario::from_parts(cfg, placement);
    FeatureOptions opts;
    opts.realizations = 8;
    const FeatureGenerator gen(s, opts);
    const FingerprintDb db = build_fingerprint_db(gen, 25.0);
    std::vector<Vec2> estimates;
    for (int k = 0; k < 2; ++k) {
        estimates.push_back(
            knn_wknn_estimate(gen.measured(k), db, 1, true, FingerprintMetric::joint).xy);
    }
    CHECK(rmse(s.placement().ue_xy, estimates) == 0.0);
}

TEST_CASE("random baseline error matches an independent uniform-pair oracle") {
    // Oracle: Monte Carlo of sqrt(mean of K squared uniform-pair distances).
    RandomStream rng(424242);
    const int trials = 40000;
    const int ues = 2;
    double oracle = 0.0;
    for (int t = 0; t < trials; ++t) {
        double acc = 0.0;
        for (int k = 0; k < ues; ++k) {
            const double dx = rng.uniform(0, 100) - rng.uniform(0, 100);
            const double dy = rng.uniform(0, 100) - rng.uniform(0, 100);
            acc += dx * dx + dy * dy;
        }
        oracle += std::sqrt(acc / ues);
    }
    oracle /= trials;

    ExperimentSpec spec;
    spec.scenario = tiny_config();
    spec.method = Method::random_baseline;
    spec.estimation = Estimation::wknn;
    spec.seeds.resize(400);
    for (std::size_t i = 0; i < spec.seeds.size(); ++i) spec.seeds[i] = 1000 + i;
    const ExperimentSummary summary = run_experiment(spec);
    CHECK(std::fabs(summary.mean_rmse - oracle) < 3.0);
}

TEST_CASE("runs persist versioned artifacts and re-run byte-identically") {
    TempDir dir("cfpos_determinism_test");
    ExperimentSpec spec;
    spec.scenario = tiny_config();
    spec.method = Method::fingerprint_wknn;
    spec.estimation = Estimation::wknn;
    spec.eta = 25.0;
    spec.k_neighbors = 2;
    spec.feature_realizations = 8;
    spec.seeds = {3, 4};
    spec.output_dir = (dir.path / "run").string();

    run_experiment(spec);
    const std::vector<std::string> files{
        "summary.json", "summary.csv", "fingerprint_wknn_seed3/manifest.json",
        "fingerprint_wknn_seed3/report.json", "fingerprint_wknn_seed3/report.csv"};
    std::map<std::string, std::string> snapshot;
    for (const auto& f : files) {
        snapshot[f] = io::read_text_file((dir.path / "run" / f).string());
        CHECK(!snapshot[f].empty());
    }
    run_experiment(spec);
    for (const auto& f : files) {
        CHECK(snapshot[f] == io::read_text_file((dir.path / "run" / f).string()));
    }

    const ExperimentSummary loaded = load_experiment_summary((dir.path / "run").string());
    CHECK(loaded.results.size() == 2);
    CHECK(loaded.results[0].report.per_ue_error.size() == 2);
}

TEST_CASE("eval report round trip") {
    io::EvalReport report;
    report.method = "fingerprint_wknn";
    report.seed = 12;
    report.config_echo = io::scenario_config_to_json(tiny_config());
    report.per_ue_error = {1.5, 2.5};
    report.rmse = 2.06;
    report.cdf = {{1.5, 0.5}, {2.5, 1.0}};
    report.actual = {{1, 2}, {3, 4}};
    report.estimated = {{1.5, 3.4}, {4, 5}};
    const auto j = io::eval_report_to_json(report);
    const io::EvalReport back = io::eval_report_from_json(j);
    CHECK(back.method == report.method);
    CHECK(back.seed == report.seed);
    CHECK(back.per_ue_error == report.per_ue_error);
    CHECK(back.cdf == report.cdf);
    CHECK(back.rmse == report.rmse);
    CHECK(io::eval_report_to_json(back).dump() == j.dump());
}

TEST_CASE("plot data exports") {
    TempDir dir("cfpos_plotdata_test");
    ExperimentSpec spec;
    spec.scenario = tiny_config();
    spec.method = Method::random_baseline;
    spec.estimation = Estimation::wknn;
    spec.seeds = {7, 8};
    spec.output_dir = (dir.path / "run").string();
    const ExperimentSummary summary = run_experiment(spec);

    emit_plot_data(summary, (dir.path / "plots").string());
    const std::string cdf = io::read_text_file((dir.path / "plots" / "cdf.csv").string());
    CHECK(cdf.rfind("seed,error,fraction\n", 0) == 0);
    // two seeds x two UEs
    CHECK(std::count(cdf.begin(), cdf.end(), '\n') == 5);
    const std::string conv = io::read_text_file((dir.path / "plots" / "convergence.csv").string());
    CHECK(conv == "seed,episode,mean_reward_p,mean_reward_c,eval_rmse\n");

    ExperimentSummary empty;
    CHECK_THROWS_AS(emit_plot_data(empty, (dir.path / "plots").string()), std::invalid_argument);

    std::vector<SweepPoint> points{{9.0, summary}};
    emit_sweep_csv("M", points, (dir.path / "plots" / "rmse_vs_M.csv").string());
    const std::string sweep = io::read_text_file((dir.path / "plots" / "rmse_vs_M.csv").string());
    CHECK(sweep.rfind("M,seed,rmse\n", 0) == 0);
}

TEST_CASE("training log csv round trip") {
    TrainingLog log;
    log.rows = {{0, -1.5, 0.25, 42.0}, {1, -1.25, 0.5, 40.0}};
    TempDir dir("cfpos_traininglog_test");
    const std::string path = (dir.path / "training.csv").string();
    io::save_training_log_csv(log, path);
    const TrainingLog back = io::load_training_log_csv(path);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[1].episode == 1);
    CHECK(back.rows[1].mean_reward_p == -1.25);
    CHECK(back.rows[1].eval_rmse == 40.0);
}

TEST_CASE("policy text format reloads parameters exactly") {
    RandomStream rng(5);
    const Mlp net = Mlp::make({3, 8, 4, 2}, OutputActivation::squash, rng);
    std::ostringstream out;
    io::save_mlp_text(net, out, "positioning.actor.0");
    std::istringstream in(out.str());
    std::string name;
    const Mlp back = io::load_mlp_text(in, &name);
    CHECK(name == "positioning.actor.0");
    CHECK((back.flatten_parameters() - net.flatten_parameters()).norm() == 0.0);
    CHECK(back.output_activation() == OutputActivation::squash);
}

TEST_CASE("fingerprint db bundle round trip") {
    ScenarioConfig cfg = tiny_config();
    const Scenario s = Scenario::build(cfg);
    FeatureOptions opts;
    opts.realizations = 4;
    const FeatureGenerator gen(s, opts);
    const FingerprintDb db = build_fingerprint_db(gen, 50.0);
    TempDir dir("cfpos_fpdb_test");
    io::save_fingerprint_db(db, (dir.path / "db").string());
    const FingerprintDb back = io::load_fingerprint_db((dir.path / "db").string());
    REQUIRE(back.size() == db.size());
    CHECK(back.spacing == db.spacing);
    for (std::size_t i = 0; i < db.size(); ++i) {
        CHECK(back.points[i].x == db.points[i].x);
        CHECK((back.features[i].rss - db.features[i].rss).norm() == 0.0);
        CHECK((back.features[i].angular - db.features[i].angular).norm() == 0.0);
    }
}
