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

#include "cfpos/io.hpp"

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cfpos::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double failed");
    return {buf.data(), ptr};
}

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' has non-numeric value '" + value + "'");
    }
}

int to_int(const std::string& key, const std::string& value) {
    const double v = to_double(key, value);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw std::invalid_argument("config: key '" + key + "' must be an integer");
    }
    return i;
}

LosMode los_mode_from_string(const std::string& s) {
    if (s == "always_los") return LosMode::always_los;
    if (s == "always_nlos") return LosMode::always_nlos;
    if (s == "probabilistic") return LosMode::probabilistic;
    throw std::invalid_argument("config: unknown los_mode '" + s + "'");
}

std::string los_mode_to_string(LosMode mode) {
    switch (mode) {
        case LosMode::always_los: return "always_los";
        case LosMode::always_nlos: return "always_nlos";
        case LosMode::probabilistic: return "probabilistic";
    }
    return "always_nlos";
}

}  // namespace

std::map<std::string, std::string> parse_key_value_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw std::invalid_argument("config: empty key on line " + std::to_string(lineno));
        }
        kv[key] = value;
    }
    return kv;
}

std::map<std::string, std::string> parse_key_value_file(const std::string& path) {
    return parse_key_value_text(read_text_file(path));
}

ScenarioConfig scenario_config_from_map(const std::map<std::string, std::string>& kv) {
    ScenarioConfig cfg;
    for (const auto& [key, value] : kv) {
        if (key == "area_side") cfg.area_side = to_double(key, value);
        else if (key == "ap_count") cfg.ap_count = to_int(key, value);
        else if (key == "ue_count") cfg.ue_count = to_int(key, value);
        else if (key == "antennas_per_ap") cfg.antennas_per_ap = to_int(key, value);
        else if (key == "paths_per_link") cfg.paths_per_link = to_int(key, value);
        else if (key == "height_gap") cfg.height_gap = to_double(key, value);
        else if (key == "pilot_length") cfg.pilot_length = to_int(key, value);
        else if (key == "tx_power_w") cfg.tx_power_w = to_double(key, value);
        else if (key == "bandwidth_hz") cfg.bandwidth_hz = to_double(key, value);
        else if (key == "noise_figure_db") cfg.noise_figure_db = to_double(key, value);
        else if (key == "coherence_block") cfg.coherence_block = to_int(key, value);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_double(key, value));
        else if (key == "los_mode") cfg.los_mode = los_mode_from_string(value);
        else if (key == "pl_fixed_loss_db") cfg.path_loss.fixed_loss_db = to_double(key, value);
        else if (key == "pl_inner_break_m") cfg.path_loss.inner_break_m = to_double(key, value);
        else if (key == "pl_outer_break_m") cfg.path_loss.outer_break_m = to_double(key, value);
        else if (key == "los_distance_threshold") cfg.los_distance_threshold = to_double(key, value);
        else if (key == "spacing_ratio") cfg.spacing_ratio = to_double(key, value);
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
    return scenario_config_from_map(parse_key_value_file(path));
}

json scenario_config_to_json(const ScenarioConfig& cfg) {
    return json{{"area_side", cfg.area_side},
                {"ap_count", cfg.ap_count},
                {"ue_count", cfg.ue_count},
                {"antennas_per_ap", cfg.antennas_per_ap},
                {"paths_per_link", cfg.paths_per_link},
                {"height_gap", cfg.height_gap},
                {"pilot_length", cfg.pilot_length},
                {"tx_power_w", cfg.tx_power_w},
                {"bandwidth_hz", cfg.bandwidth_hz},
                {"noise_figure_db", cfg.noise_figure_db},
                {"coherence_block", cfg.coherence_block},
                {"seed", cfg.seed},
                {"los_mode", los_mode_to_string(cfg.los_mode)},
                {"pl_fixed_loss_db", cfg.path_loss.fixed_loss_db},
                {"pl_inner_break_m", cfg.path_loss.inner_break_m},
                {"pl_outer_break_m", cfg.path_loss.outer_break_m},
                {"los_distance_threshold", cfg.los_distance_threshold},
                {"spacing_ratio", cfg.spacing_ratio}};
}

ScenarioConfig scenario_config_from_json(const json& j) {
    ScenarioConfig cfg;
    cfg.area_side = j.at("area_side").get<double>();
    cfg.ap_count = j.at("ap_count").get<int>();
    cfg.ue_count = j.at("ue_count").get<int>();
    cfg.antennas_per_ap = j.at("antennas_per_ap").get<int>();
    cfg.paths_per_link = j.at("paths_per_link").get<int>();
    cfg.height_gap = j.at("height_gap").get<double>();
    cfg.pilot_length = j.at("pilot_length").get<int>();
    cfg.tx_power_w = j.at("tx_power_w").get<double>();
    cfg.bandwidth_hz = j.at("bandwidth_hz").get<double>();
    cfg.noise_figure_db = j.at("noise_figure_db").get<double>();
    cfg.coherence_block = j.at("coherence_block").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.los_mode = los_mode_from_string(j.at("los_mode").get<std::string>());
    cfg.path_loss.fixed_loss_db = j.at("pl_fixed_loss_db").get<double>();
    cfg.path_loss.inner_break_m = j.at("pl_inner_break_m").get<double>();
    cfg.path_loss.outer_break_m = j.at("pl_outer_break_m").get<double>();
    cfg.los_distance_threshold = j.at("los_distance_threshold").get<double>();
    cfg.spacing_ratio = j.at("spacing_ratio").get<double>();
    return cfg;
}

json scenario_to_json(const Scenario& scenario) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "scenario";
    j["config"] = scenario_config_to_json(scenario.config());
    j["noise_power_w"] = scenario.noise_power_w();
    json aps = json::array();
    for (const auto& p : scenario.placement().ap_xy) aps.push_back({p.x, p.y});
    json ues = json::array();
    for (const auto& p : scenario.placement().ue_xy) ues.push_back({p.x, p.y});
    j["placement"] = json{{"ap_xy", aps}, {"ue_xy", ues}};
    json links = json::array();
    for (int m = 0; m < scenario.ap_count(); ++m) {
        for (int k = 0; k < scenario.ue_count(); ++k) {
            const LinkState& link = scenario.link(m, k);
            links.push_back(json{{"ap", m},
                                 {"ue", k},
                                 {"beta", link.beta},
                                 {"kappa", link.kappa},
                                 {"los_angle", link.los_angle},
                                 {"distance", link.distance},
                                 {"nlos_angles", link.nlos_angles}});
        }
    }
    j["links"] = links;
    return j;
}

Scenario scenario_from_json(const json& j) {
    if (j.at("schema_version").get<int>() != kSchemaVersion) {
        throw std::invalid_argument("scenario: unsupported schema version");
    }
    const ScenarioConfig cfg = scenario_config_from_json(j.at("config"));
    Placement placement;
    for (const auto& p : j.at("placement").at("ap_xy")) {
        placement.ap_xy.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    for (const auto& p : j.at("placement").at("ue_xy")) {
        placement.ue_xy.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    return Scenario::from_parts(cfg, placement);
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    write_text_file(path, scenario_to_json(scenario).dump(2) + "\n");
}

Scenario load_scenario(const std::string& path) {
    return scenario_from_json(json::parse(read_text_file(path)));
}

void save_feature_set_csv(const FeatureSet& fs, const std::string& path) {
    std::ostringstream out;
    out << "# cfpos feature-set v" << kSchemaVersion << "\n";
    out << "# rows: source; position; rss over M APs; theta rows (antenna n over M APs)\n";
    out << "source," << (fs.source == FeatureSource::measured ? "measured" : "hypothesis") << "\n";
    out << "position," << format_double(fs.position.x) << "," << format_double(fs.position.y) << "\n";
    out << "rss";
    for (int m = 0; m < fs.rss.size(); ++m) out << "," << format_double(fs.rss(m));
    out << "\n";
    for (int n = 0; n < fs.angular.rows(); ++n) {
        out << "theta";
        for (int m = 0; m < fs.angular.cols(); ++m) out << "," << format_double(fs.angular(n, m));
        out << "\n";
    }
    write_text_file(path, out.str());
}

void save_fingerprint_db(const FingerprintDb& db, const std::string& dir) {
    fs::create_directories(dir);
    {
        std::ostringstream out;
        out << "index,x,y\n";
        for (std::size_t i = 0; i < db.points.size(); ++i) {
            out << i << "," << format_double(db.points[i].x) << ","
                << format_double(db.points[i].y) << "\n";
        }
        write_text_file((fs::path(dir) / "points.csv").string(), out.str());
    }
    {
        const int aps = db.features.empty() ? 0 : static_cast<int>(db.features[0].rss.size());
        const int antennas = db.features.empty() ? 0 : static_cast<int>(db.features[0].angular.rows());
        std::ostringstream out;
        out << "# cfpos fingerprint features v" << kSchemaVersion << "; spacing="
            << format_double(db.spacing) << "; aps=" << aps << "; antennas=" << antennas << "\n";
        out << "# columns: index, psi[0.." << aps << "), theta row-major (" << antennas
            << " rows of " << aps << ")\n";
        for (std::size_t i = 0; i < db.features.size(); ++i) {
            out << i;
            const FeatureSet& f = db.features[i];
            for (int m = 0; m < f.rss.size(); ++m) out << "," << format_double(f.rss(m));
            for (int n = 0; n < f.angular.rows(); ++n) {
                for (int m = 0; m < f.angular.cols(); ++m) {
                    out << "," << format_double(f.angular(n, m));
                }
            }
            out << "\n";
        }
        write_text_file((fs::path(dir) / "features.csv").string(), out.str());
    }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    return cells;
}

}  // namespace

FingerprintDb load_fingerprint_db(const std::string& dir) {
    FingerprintDb db;
    {
        std::istringstream in(read_text_file((fs::path(dir) / "points.csv").string()));
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            const auto cells = split_csv(line);
            db.points.push_back({std::stod(cells.at(1)), std::stod(cells.at(2))});
        }
    }
    {
        std::istringstream in(read_text_file((fs::path(dir) / "features.csv").string()));
        std::string line;
        std::getline(in, line);
        int aps = 0;
        int antennas = 0;
        {
            std::istringstream header(line);
            std::string token;
            while (std::getline(header, token, ';')) {
                const std::string t = trim(token);
                if (t.rfind("spacing=", 0) == 0) db.spacing = std::stod(t.substr(8));
                if (t.rfind("aps=", 0) == 0) aps = std::stoi(t.substr(4));
                if (t.rfind("antennas=", 0) == 0) antennas = std::stoi(t.substr(9));
            }
        }
        std::getline(in, line);  // column comment
        std::size_t index = 0;
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            const auto cells = split_csv(line);
            FeatureSet f;
            f.source = FeatureSource::hypothesis;
            f.position = db.points.at(index);
            f.rss.resize(aps);
            for (int m = 0; m < aps; ++m) f.rss(m) = std::stod(cells.at(1 + m));
            f.angular.resize(antennas, aps);
            for (int n = 0; n < antennas; ++n) {
                for (int m = 0; m < aps; ++m) {
                    f.angular(n, m) = std::stod(cells.at(1 + aps + n * aps + m));
                }
            }
            db.features.push_back(std::move(f));
            ++index;
        }
    }
    return db;
}

void save_training_log_csv(const TrainingLog& log, const std::string& path) {
    std::ostringstream out;
    out << "episode,mean_reward_p,mean_reward_c,eval_rmse\n";
    for (const auto& row : log.rows) {
        out << row.episode << "," << format_double(row.mean_reward_p) << ","
            << format_double(row.mean_reward_c) << "," << format_double(row.eval_rmse) << "\n";
    }
    write_text_file(path, out.str());
}

TrainingLog load_training_log_csv(const std::string& path) {
    TrainingLog log;
    std::istringstream in(read_text_file(path));
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        log.rows.push_back({std::stoi(cells.at(0)), std::stod(cells.at(1)), std::stod(cells.at(2)),
                            std::stod(cells.at(3))});
    }
    return log;
}

void save_mlp_text(const Mlp& net, std::ostream& out, const std::string& name) {
    out << "mlp " << name << "\n";
    const auto sizes = net.layer_sizes();
    out << "layers " << sizes.size();
    for (int s : sizes) out << " " << s;
    out << "\n";
    out << "activation "
        << (net.output_activation() == OutputActivation::squash ? "squash" : "identity") << "\n";
    for (std::size_t l = 0; l < net.weights().size(); ++l) {
        out << "layer " << l << "\n";
        const MatrixXd& w = net.weights()[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                out << (c == 0 ? "" : " ") << format_double(w(r, c));
            }
            out << "\n";
        }
        out << "bias";
        for (Eigen::Index r = 0; r < net.biases()[l].size(); ++r) {
            out << " " << format_double(net.biases()[l](r));
        }
        out << "\n";
    }
    out << "end\n";
}

Mlp load_mlp_text(std::istream& in, std::string* name) {
    std::string token;
    in >> token;
    if (token != "mlp") throw std::invalid_argument("policy: expected 'mlp' record");
    std::string net_name;
    in >> net_name;
    if (name) *name = net_name;
    in >> token;
    if (token != "layers") throw std::invalid_argument("policy: expected 'layers'");
    std::size_t count = 0;
    in >> count;
    std::vector<int> sizes(count);
    for (auto& s : sizes) in >> s;
    in >> token;
    if (token != "activation") throw std::invalid_argument("policy: expected 'activation'");
    std::string act;
    in >> act;
    RandomStream dummy(0);
    Mlp net = Mlp::make(sizes, act == "squash" ? OutputActivation::squash : OutputActivation::identity,
                        dummy);
    VectorXd flat(static_cast<Eigen::Index>(net.parameter_count()));
    Eigen::Index pos = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        in >> token;  // "layer"
        std::size_t idx = 0;
        in >> idx;
        if (token != "layer" || idx != l) throw std::invalid_argument("policy: bad layer record");
        MatrixXd w(sizes[l + 1], sizes[l]);
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) in >> w(r, c);
        }
        in >> token;
        if (token != "bias") throw std::invalid_argument("policy: expected 'bias'");
        VectorXd b(sizes[l + 1]);
        for (Eigen::Index r = 0; r < b.size(); ++r) in >> b(r);
        for (Eigen::Index c = 0; c < w.cols(); ++c) {
            for (Eigen::Index r = 0; r < w.rows(); ++r) flat(pos++) = w(r, c);
        }
        for (Eigen::Index r = 0; r < b.size(); ++r) flat(pos++) = b(r);
    }
    in >> token;
    if (token != "end") throw std::invalid_argument("policy: expected 'end'");
    net.set_parameters(flat);
    return net;
}

void save_policy(const JpcResult& result, const std::string& path) {
    std::ostringstream out;
    out << "cfpos-policy " << kSchemaVersion << "\n";
    out << "agents " << result.positioning.size() << "\n";
    auto dump_bundle = [&out](const AgentBundle& b, const std::string& prefix) {
        save_mlp_text(b.actor, out, prefix + ".actor");
        save_mlp_text(b.critic, out, prefix + ".critic");
        save_mlp_text(b.target_actor, out, prefix + ".target_actor");
        save_mlp_text(b.target_critic, out, prefix + ".target_critic");
    };
    for (std::size_t m = 0; m < result.positioning.size(); ++m) {
        dump_bundle(result.positioning[m], "positioning." + std::to_string(m));
    }
    for (std::size_t m = 0; m < result.correction.size(); ++m) {
        dump_bundle(result.correction[m], "correction." + std::to_string(m));
    }
    write_text_file(path, out.str());
}

json eval_report_to_json(const EvalReport& report) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "eval_report";
    j["code_version"] = kCodeVersion;
    j["method"] = report.method;
    j["seed"] = report.seed;
    j["config"] = report.config_echo;
    j["per_ue_error"] = report.per_ue_error;
    j["rmse"] = report.rmse;
    json cdf = json::array();
    for (const auto& [e, f] : report.cdf) cdf.push_back({e, f});
    j["cdf"] = cdf;
    json actual = json::array();
    for (const auto& p : report.actual) actual.push_back({p.x, p.y});
    json estimated = json::array();
    for (const auto& p : report.estimated) estimated.push_back({p.x, p.y});
    j["actual"] = actual;
    j["estimated"] = estimated;
    return j;
}

EvalReport eval_report_from_json(const json& j) {
    EvalReport report;
    report.method = j.at("method").get<std::string>();
    report.seed = j.at("seed").get<std::uint64_t>();
    report.config_echo = j.at("config");
    report.per_ue_error = j.at("per_ue_error").get<std::vector<double>>();
    report.rmse = j.at("rmse").get<double>();
    for (const auto& pair : j.at("cdf")) {
        report.cdf.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
    for (const auto& p : j.at("actual")) {
        report.actual.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    for (const auto& p : j.at("estimated")) {
        report.estimated.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    return report;
}

void save_eval_report(const EvalReport& report, const std::string& json_path,
                      const std::string& csv_path) {
    write_text_file(json_path, eval_report_to_json(report).dump(2) + "\n");
    std::ostringstream out;
    out << "ue,actual_x,actual_y,estimated_x,estimated_y,error\n";
    for (std::size_t k = 0; k < report.per_ue_error.size(); ++k) {
        out << k << "," << format_double(report.actual[k].x) << ","
            << format_double(report.actual[k].y) << "," << format_double(report.estimated[k].x)
            << "," << format_double(report.estimated[k].y) << ","
            << format_double(report.per_ue_error[k]) << "\n";
    }
    write_text_file(csv_path, out.str());
}

void save_similarity_grid_csv(const SimilarityGrid& grid, const std::string& path) {
    std::ostringstream out;
    out << "x,y,angle_similarity,distance_normalized,joint\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out << format_double(grid.x[i]) << "," << format_double(grid.y[i]) << ","
            << format_double(grid.angle[i]) << "," << format_double(grid.distance_normalized[i])
            << "," << format_double(grid.joint[i]) << "\n";
    }
    write_text_file(path, out.str());
}

void write_text_file(const std::string& path, const std::string& content) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("io: cannot open '" + path + "' for writing");
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("io: cannot open '" + path + "' for reading");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace cfpos::io
