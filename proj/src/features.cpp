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

#include "cfpos/features.hpp"

#include <cmath>

namespace cfpos {

PilotBook PilotBook::make(int pilot_length) {
    if (pilot_length < 1) throw std::invalid_argument("pilot_book: pilot_length must be >= 1");
    PilotBook book;
    // Time-multiplexed orthogonal sequences: column k is sqrt(tau_p) e_k.
    // Disjoint support keeps the pairwise inner products exactly zero.
    book.sequences = MatrixXcd::Zero(pilot_length, pilot_length);
    const double amp = std::sqrt(static_cast<double>(pilot_length));
    for (int k = 0; k < pilot_length; ++k) book.sequences(k, k) = amp;
    book.assignment.resize(static_cast<std::size_t>(pilot_length));
    for (int k = 0; k < pilot_length; ++k) book.assignment[k] = k;
    return book;
}

VectorXcd ls_estimate(const VectorXcd& h_true, double tx_power_w, int pilot_length,
                      double noise_power_w, RandomStream& rng) {
    const double p_tau = tx_power_w * pilot_length;
    if (p_tau <= 0.0) throw std::invalid_argument("ls_estimate: p_k * tau_p must be positive");
    const double noise_scale = std::sqrt(noise_power_w) / std::sqrt(p_tau);
    VectorXcd h_hat = h_true;
    if (noise_scale > 0.0) {
        for (int n = 0; n < h_hat.size(); ++n) h_hat(n) += noise_scale * rng.complex_gaussian();
    }
    return h_hat;
}

double rss_instant(const VectorXcd& h, double tx_power_w, int pilot_length) {
    return tx_power_w * pilot_length * h.squaredNorm();
}

double rss_hardened(double beta, int antennas, double tx_power_w, int pilot_length) {
    if (beta < 0.0) throw std::invalid_argument("rss_hardened: beta must be >= 0");
    return antennas * tx_power_w * pilot_length * beta;
}

MatrixXcd dft_matrix(int n) {
    if (n < 1) throw std::invalid_argument("dft_matrix: size must be >= 1");
    MatrixXcd f(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            f(r, c) = std::polar(1.0, -2.0 * kPi * static_cast<double>(r) * c / n);
        }
    }
    return f;
}

VectorXcd angular_response(const VectorXcd& h_hat) {
    return dft_matrix(static_cast<int>(h_hat.size())) * h_hat;
}

namespace {

/// Dirichlet ratio sin(N w / 2) / sin(w / 2) with its removable singularities.
double dirichlet_ratio(double omega, int n) {
    const double den = std::sin(omega / 2.0);
    if (std::fabs(den) < 1e-12) {
        const auto k = static_cast<long long>(std::llround(omega / (2.0 * kPi)));
        const double sign = (k * static_cast<long long>(n - 1)) % 2 == 0 ? 1.0 : -1.0;
        return sign * n;
    }
    return std::sin(static_cast<double>(n) * omega / 2.0) / den;
}

std::complex<double> dirichlet_term(double theta, int row, int antennas, double spacing_ratio) {
    const double omega = 2.0 * kPi * row / antennas + 2.0 * kPi * spacing_ratio * std::cos(theta);
    return std::polar(1.0, -(antennas - 1) * omega / 2.0) * dirichlet_ratio(omega, antennas);
}

}  // namespace

std::complex<double> closed_form_element(const LinkState& link, int antennas,
                                         double spacing_ratio, std::complex<double> phase,
                                         const std::vector<std::complex<double>>& path_gains,
                                         int row) {
    if (row < 0 || row >= antennas) throw std::invalid_argument("closed_form_element: row out of range");
    if (path_gains.size() != link.nlos_angles.size()) {
        throw std::invalid_argument("closed_form_element: one gain per path expected");
    }
    const double kappa = link.kappa;
    const double beta = link.beta;
    const auto paths = static_cast<double>(link.nlos_angles.size());

    std::complex<double> value =
        std::sqrt(kappa * beta / (kappa + 1.0)) * phase *
        dirichlet_term(link.los_angle, row, antennas, spacing_ratio);
    const double nlos_scale = std::sqrt(beta / (paths * (kappa + 1.0)));
    for (std::size_t l = 0; l < link.nlos_angles.size(); ++l) {
        value += nlos_scale * path_gains[l] *
                 dirichlet_term(link.nlos_angles[l], row, antennas, spacing_ratio);
    }
    return value;
}

VectorXd angular_power(const LinkState& link, int antennas, double spacing_ratio,
                       double tx_power_w, int pilot_length, double noise_power_w,
                       int realizations, RandomStream& rng) {
    if (realizations < 1) throw std::invalid_argument("angular_power: realizations must be >= 1");
    const double p_tau = tx_power_w * pilot_length;
    if (p_tau <= 0.0) throw std::invalid_argument("angular_power: p_k * tau_p must be positive");
    const MatrixXcd f = dft_matrix(antennas);

    // Path angles are frozen, so the per-path steering vectors (and their DFT
    // images) are draw-invariant; only phases, path gains and noise vary.
    const double kappa = link.kappa;
    const double beta = link.beta;
    const auto paths = static_cast<double>(link.nlos_angles.size());
    const double los_scale = std::sqrt(kappa * beta / (kappa + 1.0));
    const double nlos_scale = std::sqrt(beta / (paths * (kappa + 1.0)));
    const double noise_scale = std::sqrt(noise_power_w) / std::sqrt(p_tau);

    VectorXcd base_los;
    if (los_scale > 0.0) {
        base_los = los_scale * (f * steering_vector(link.los_angle, antennas, spacing_ratio));
    }
    std::vector<VectorXcd> base_paths;
    if (nlos_scale > 0.0) {
        base_paths.reserve(link.nlos_angles.size());
        for (double angle : link.nlos_angles) {
            base_paths.push_back(nlos_scale * (f * steering_vector(angle, antennas, spacing_ratio)));
        }
    }

    VectorXd acc = VectorXd::Zero(antennas);
    VectorXcd g(antennas);
    VectorXcd noise(antennas);
    for (int r = 0; r < realizations; ++r) {
        g.setZero();
        const double mu = rng.uniform(0.0, 2.0 * kPi);
        if (los_scale > 0.0) g += std::polar(1.0, mu) * base_los;
        for (std::size_t l = 0; l < link.nlos_angles.size(); ++l) {
            const std::complex<double> alpha = rng.complex_gaussian();
            if (nlos_scale > 0.0) g += alpha * base_paths[l];
        }
        if (noise_scale > 0.0) {
            for (int n = 0; n < antennas; ++n) noise(n) = noise_scale * rng.complex_gaussian();
            g.noalias() += f * noise;
        }
        acc += g.cwiseAbs2();
    }
    return acc / realizations;
}

FeatureGenerator::FeatureGenerator(const Scenario& scenario, FeatureOptions options)
    : scenario_(std::make_shared<Scenario>(scenario)), options_(options) {
    if (options_.realizations < 1) {
        throw std::invalid_argument("features: realizations must be >= 1");
    }
    if (options_.cell_size <= 0.0) {
        throw std::invalid_argument("features: cell_size must be positive");
    }
}

Vec2 FeatureGenerator::cell_center_of(Vec2 position) const {
    const double cs = options_.cell_size;
    const double side = scenario_->config().area_side;
    auto center = [cs, side](double v) {
        double c = (std::floor(v / cs) + 0.5) * cs;
        return std::min(std::max(c, 0.0), side);
    };
    return {center(position.x), center(position.y)};
}

const MatrixXd& FeatureGenerator::angular_at_cell(std::uint64_t cell, Vec2 cell_center) const {
    auto it = cache_.find(cell);
    if (it != cache_.end()) return it->second;

    const auto& cfg = scenario_->config();
    const int antennas = cfg.antennas_per_ap;
    MatrixXd theta(antennas, cfg.ap_count);
    for (int m = 0; m < cfg.ap_count; ++m) {
        const LinkState link = link_between(cfg, scenario_->placement().ap_xy[m], m, cell_center);
        RandomStream rng = RandomStream(cfg.seed).substream(
            stream_tag::kFeatureDraws, static_cast<std::uint64_t>(m), cell);
        theta.col(m) = angular_power(link, antennas, cfg.spacing_ratio, cfg.tx_power_w,
                                     cfg.effective_pilot_length(), scenario_->noise_power_w(),
                                     options_.realizations, rng);
    }
    return cache_.emplace(cell, std::move(theta)).first->second;
}

FeatureSet FeatureGenerator::features_at(Vec2 position, FeatureSource source) const {
    FeatureSet fs;
    fs.source = source;
    fs.position = position;
    fs.rss = hypothesis_rss(position);
    const std::uint64_t cell = position_cell(position, options_.cell_size);
    fs.angular = angular_at_cell(cell, cell_center_of(position));
    return fs;
}

VectorXd FeatureGenerator::hypothesis_rss(Vec2 position) const {
    const auto& cfg = scenario_->config();
    if (position.x < 0.0 || position.x > cfg.area_side || position.y < 0.0 ||
        position.y > cfg.area_side) {
        throw std::invalid_argument("features: position outside deployment area");
    }
    VectorXd psi(cfg.ap_count);
    if (options_.instantaneous_rss) {
        const std::uint64_t cell = position_cell(position, options_.cell_size);
        for (int m = 0; m < cfg.ap_count; ++m) {
            const LinkState link = link_between(cfg, scenario_->placement().ap_xy[m], m, position);
            RandomStream rng = RandomStream(cfg.seed).substream(
                stream_tag::kFeatureDraws, 0x525353ull ^ static_cast<std::uint64_t>(m), cell);
            const ChannelDraw draw = draw_channel(link, cfg.antennas_per_ap, cfg.spacing_ratio, rng);
            psi(m) = rss_instant(draw.h, cfg.tx_power_w, cfg.effective_pilot_length());
        }
    } else {
        for (int m = 0; m < cfg.ap_count; ++m) {
            const double d = wrap_distance(scenario_->placement().ap_xy[m], position,
                                           cfg.area_side, cfg.height_gap);
            psi(m) = rss_hardened(path_loss(d, cfg.path_loss), cfg.antennas_per_ap,
                                  cfg.tx_power_w, cfg.effective_pilot_length());
        }
    }
    return psi;
}

FeatureSet FeatureGenerator::measured(int ue_index) const {
    if (ue_index < 0 || ue_index >= scenario_->ue_count()) {
        throw std::invalid_argument("features: ue_index out of range");
    }
    return features_at(scenario_->placement().ue_xy[ue_index], FeatureSource::measured);
}

FeatureSet FeatureGenerator::hypothesis(Vec2 position) const {
    return features_at(position, FeatureSource::hypothesis);
}

}  // namespace cfpos
