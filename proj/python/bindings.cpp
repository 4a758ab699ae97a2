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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cfpos/estimate.hpp"
#include "cfpos/io.hpp"
#include "cfpos/jpc.hpp"

namespace py = pybind11;
using namespace cfpos;

namespace {

AngleAggregate aggregate_from_string(const std::string& s) {
    if (s == "normalized") return AngleAggregate::normalized;
    if (s == "as_written") return AngleAggregate::as_written;
    throw std::invalid_argument("mode must be 'normalized' or 'as_written'");
}

FingerprintMetric metric_from_name(const std::string& s) {
    if (s == "rss") return FingerprintMetric::rss;
    if (s == "aoa") return FingerprintMetric::aoa;
    if (s == "joint") return FingerprintMetric::joint;
    throw std::invalid_argument("metric must be 'rss', 'aoa' or 'joint'");
}

}  // namespace

PYBIND11_MODULE(_cfpos, m) {
    m.doc() = "Cooperative multi-target positioning for cell-free massive MIMO";

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<>())
        .def(py::init([](double x, double y) { return Vec2{x, y}; }))
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y)
        .def("__repr__", [](const Vec2& v) {
            return "Vec2(" + io::format_double(v.x) + ", " + io::format_double(v.y) + ")";
        });

    py::enum_<LosMode>(m, "LosMode")
        .value("always_los", LosMode::always_los)
        .value("always_nlos", LosMode::always_nlos)
        .value("probabilistic", LosMode::probabilistic);

    py::class_<PathLossParams>(m, "PathLossParams")
        .def(py::init<>())
        .def_readwrite("fixed_loss_db", &PathLossParams::fixed_loss_db)
        .def_readwrite("inner_break_m", &PathLossParams::inner_break_m)
        .def_readwrite("outer_break_m", &PathLossParams::outer_break_m);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("area_side", &ScenarioConfig::area_side)
        .def_readwrite("ap_count", &ScenarioConfig::ap_count)
        .def_readwrite("ue_count", &ScenarioConfig::ue_count)
        .def_readwrite("antennas_per_ap", &ScenarioConfig::antennas_per_ap)
        .def_readwrite("paths_per_link", &ScenarioConfig::paths_per_link)
        .def_readwrite("height_gap", &ScenarioConfig::height_gap)
        .def_readwrite("pilot_length", &ScenarioConfig::pilot_length)
        .def_readwrite("tx_power_w", &ScenarioConfig::tx_power_w)
        .def_readwrite("bandwidth_hz", &ScenarioConfig::bandwidth_hz)
        .def_readwrite("noise_figure_db", &ScenarioConfig::noise_figure_db)
        .def_readwrite("coherence_block", &ScenarioConfig::coherence_block)
        .def_readwrite("seed", &ScenarioConfig::seed)
        .def_readwrite("los_mode", &ScenarioConfig::los_mode)
        .def_readwrite("path_loss", &ScenarioConfig::path_loss)
        .def_readwrite("los_distance_threshold", &ScenarioConfig::los_distance_threshold)
        .def_readwrite("spacing_ratio", &ScenarioConfig::spacing_ratio);

    py::class_<LinkState>(m, "LinkState")
        .def_readonly("beta", &LinkState::beta)
        .def_readonly("kappa", &LinkState::kappa)
        .def_readonly("los_angle", &LinkState::los_angle)
        .def_readonly("nlos_angles", &LinkState::nlos_angles)
        .def_readonly("distance", &LinkState::distance);

    py::class_<Scenario>(m, "Scenario")
        .def_static("build", &Scenario::build)
        .def_property_readonly("config", &Scenario::config)
        .def_property_readonly("noise_power_w", &Scenario::noise_power_w)
        .def_property_readonly("ap_xy",
                               [](const Scenario& s) { return s.placement().ap_xy; })
        .def_property_readonly("ue_xy",
                               [](const Scenario& s) { return s.placement().ue_xy; })
        .def("link", &Scenario::link, py::return_value_policy::reference_internal)
        .def("with_ue_positions", &Scenario::with_ue_positions)
        .def("to_json", [](const Scenario& s) { return io::scenario_to_json(s).dump(2); });

    m.def("build_scenario", &Scenario::build, py::arg("config"));
    m.def("wrap_distance", &wrap_distance, py::arg("p"), py::arg("q"), py::arg("area_side"),
          py::arg("height_gap"));
    m.def("path_loss", &path_loss, py::arg("distance_m"), py::arg("params") = PathLossParams{});
    m.def("path_loss_db", &path_loss_db, py::arg("distance_m"),
          py::arg("params") = PathLossParams{});
    m.def("rician_factor", &rician_factor, py::arg("distance_m"), py::arg("line_of_sight"));
    m.def("noise_power_watt", &noise_power_watt, py::arg("bandwidth_hz"),
          py::arg("noise_figure_db"));
    m.def("steering_vector", &steering_vector, py::arg("theta"), py::arg("antennas"),
          py::arg("spacing_ratio") = 0.5);
    m.def("dft_matrix", &dft_matrix, py::arg("n"));
    m.def("angular_response", &angular_response, py::arg("h_hat"));

    py::class_<FeatureOptions>(m, "FeatureOptions")
        .def(py::init<>())
        .def_readwrite("realizations", &FeatureOptions::realizations)
        .def_readwrite("instantaneous_rss", &FeatureOptions::instantaneous_rss)
        .def_readwrite("cell_size", &FeatureOptions::cell_size);

    py::class_<FeatureSet>(m, "FeatureSet")
        .def_readonly("rss", &FeatureSet::rss)
        .def_readonly("angular", &FeatureSet::angular)
        .def_readonly("position", &FeatureSet::position)
        .def_property_readonly("source", [](const FeatureSet& fs) {
            return fs.source == FeatureSource::measured ? "measured" : "hypothesis";
        });

    py::class_<FeatureGenerator>(m, "FeatureGenerator")
        .def(py::init<const Scenario&, FeatureOptions>(), py::arg("scenario"),
             py::arg("options") = FeatureOptions{})
        .def("measured", &FeatureGenerator::measured, py::arg("ue_index"))
        .def("hypothesis", &FeatureGenerator::hypothesis, py::arg("position"))
        .def("hypothesis_rss", &FeatureGenerator::hypothesis_rss, py::arg("position"));

    m.def(
        "angle_similarity",
        [](const MatrixXd& actual, const MatrixXd& hyp, const std::vector<int>& subset,
           const std::string& mode) {
            const AngleSimilarity sim =
                angle_similarity(actual, hyp, subset, aggregate_from_string(mode));
            return py::make_tuple(sim.aggregate, sim.per_ap);
        },
        py::arg("theta_actual"), py::arg("theta_hyp"), py::arg("subset"),
        py::arg("mode") = "normalized");
    m.def("distance_dissimilarity", &distance_dissimilarity, py::arg("psi_actual"),
          py::arg("psi_hyp"), py::arg("subset"));
    m.def("normalize_dissimilarity", &normalize_dissimilarity, py::arg("values"));
    m.def("joint_similarity", &joint_similarity, py::arg("distance_normalized"),
          py::arg("angle_similarity"));
    m.def(
        "select_evaluation_subset",
        [](const std::vector<double>& joints, int size, const std::string& scheme,
           const std::vector<double>& distances, double threshold) {
            SubsetScheme s = SubsetScheme::highest_similarity;
            if (scheme == "closest_distance") s = SubsetScheme::closest_distance;
            else if (scheme == "threshold") s = SubsetScheme::threshold;
            else if (scheme != "highest_similarity")
                throw std::invalid_argument("unknown subset scheme '" + scheme + "'");
            return select_evaluation_subset(joints, size, s, distances, threshold);
        },
        py::arg("per_ap_joint"), py::arg("subset_size"), py::arg("scheme") = "highest_similarity",
        py::arg("ap_distances") = std::vector<double>{}, py::arg("threshold") = 0.0);

    py::class_<SimilarityGrid>(m, "SimilarityGrid")
        .def_readonly("per_side", &SimilarityGrid::per_side)
        .def_readonly("spacing", &SimilarityGrid::spacing)
        .def_readonly("x", &SimilarityGrid::x)
        .def_readonly("y", &SimilarityGrid::y)
        .def_readonly("angle", &SimilarityGrid::angle)
        .def_readonly("distance_normalized", &SimilarityGrid::distance_normalized)
        .def_readonly("joint", &SimilarityGrid::joint)
        .def("argmax_joint", &SimilarityGrid::argmax_joint)
        .def("argmin_distance", &SimilarityGrid::argmin_distance);
    m.def(
        "similarity_grid",
        [](const FeatureGenerator& gen, Vec2 actual, Vec2 center, double spacing, int per_side,
           const std::string& mode) {
            return similarity_grid(gen, actual, center, spacing, per_side,
                                   aggregate_from_string(mode));
        },
        py::arg("generator"), py::arg("actual_position"), py::arg("center"), py::arg("spacing"),
        py::arg("per_side"), py::arg("mode") = "normalized");

    py::class_<PositionEstimate>(m, "PositionEstimate")
        .def_readonly("ue_index", &PositionEstimate::ue_index)
        .def_readonly("xy", &PositionEstimate::xy)
        .def_readonly("contributing_aps", &PositionEstimate::contributing_aps)
        .def_readonly("weights", &PositionEstimate::weights)
        .def_readonly("per_ap_joint", &PositionEstimate::per_ap_joint);

    py::class_<FingerprintDb>(m, "FingerprintDb")
        .def_readonly("spacing", &FingerprintDb::spacing)
        .def_readonly("points", &FingerprintDb::points)
        .def("__len__", &FingerprintDb::size)
        .def("feature", [](const FingerprintDb& db, std::size_t i) { return db.features.at(i); });

    m.def("build_fingerprint_db", &build_fingerprint_db, py::arg("generator"), py::arg("eta"));
    m.def(
        "knn_wknn_estimate",
        [](const FeatureSet& query, const FingerprintDb& db, int k, bool weighted,
           const std::string& metric) {
            return knn_wknn_estimate(query, db, k, weighted, metric_from_name(metric));
        },
        py::arg("query"), py::arg("db"), py::arg("k"), py::arg("weighted") = true,
        py::arg("metric") = "joint");
    m.def("cowknn_select", &cowknn_select, py::arg("per_ap_joint"), py::arg("threshold"),
          py::arg("max_aps"));
    m.def("cowknn_weights", &cowknn_weights, py::arg("selected_coefficients"));
    m.def("cowknn_estimate", &cowknn_estimate, py::arg("ue_index"), py::arg("ap_xy"),
          py::arg("distances"), py::arg("angles"), py::arg("angle_offsets"),
          py::arg("per_ap_joint"), py::arg("threshold"), py::arg("max_aps"),
          py::arg("area_side"));
    m.def("rmse", &rmse, py::arg("actual"), py::arg("estimated"));
    m.def("cdf_curve", &cdf_curve, py::arg("errors"));
    m.def("position_from_action", &position_from_action, py::arg("ap_xy"), py::arg("distance"),
          py::arg("angle"), py::arg("angle_offset"), py::arg("area_side"));

    py::class_<AgentHyper>(m, "AgentHyper")
        .def(py::init<>())
        .def_readwrite("gamma", &AgentHyper::gamma)
        .def_readwrite("tau_soft", &AgentHyper::tau_soft)
        .def_readwrite("lr_actor", &AgentHyper::lr_actor)
        .def_readwrite("lr_critic", &AgentHyper::lr_critic)
        .def_readwrite("batch_size", &AgentHyper::batch_size)
        .def_readwrite("buffer_capacity", &AgentHyper::buffer_capacity)
        .def_readwrite("sigma_explore_init", &AgentHyper::sigma_explore_init)
        .def_readwrite("sigma_explore_final", &AgentHyper::sigma_explore_final)
        .def_readwrite("paper_soft_update", &AgentHyper::paper_soft_update);

    py::class_<JpcHyper>(m, "JpcHyper")
        .def(py::init<>())
        .def_readwrite("positioning", &JpcHyper::positioning)
        .def_readwrite("correction", &JpcHyper::correction)
        .def_readwrite("episodes", &JpcHyper::episodes)
        .def_readwrite("steps_per_episode", &JpcHyper::steps_per_episode)
        .def_readwrite("eval_subset_size", &JpcHyper::eval_subset_size)
        .def_readwrite("cowknn_max_aps", &JpcHyper::cowknn_max_aps)
        .def_readwrite("cowknn_threshold", &JpcHyper::cowknn_threshold)
        .def_readwrite("delta_max", &JpcHyper::delta_max)
        .def_readwrite("d_max", &JpcHyper::d_max)
        .def_readwrite("log_compress_correction", &JpcHyper::log_compress_correction)
        .def_readwrite("randomize_ue_per_episode", &JpcHyper::randomize_ue_per_episode);

    py::class_<TrainingLogRow>(m, "TrainingLogRow")
        .def_readonly("episode", &TrainingLogRow::episode)
        .def_readonly("mean_reward_p", &TrainingLogRow::mean_reward_p)
        .def_readonly("mean_reward_c", &TrainingLogRow::mean_reward_c)
        .def_readonly("eval_rmse", &TrainingLogRow::eval_rmse);

    py::class_<JpcResult>(m, "JpcResult")
        .def_property_readonly("log_rows",
                               [](const JpcResult& r) { return r.log.rows; })
        .def_readonly("final_estimates", &JpcResult::final_estimates)
        .def_readonly("final_rmse", &JpcResult::final_rmse);

    m.def("train_jpc", &train_jpc, py::arg("scenario"), py::arg("generator"), py::arg("hyper"),
          py::call_guard<py::gil_scoped_release>());

    m.attr("__version__") = io::kCodeVersion;
}
