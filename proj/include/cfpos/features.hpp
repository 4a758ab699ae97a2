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

#include <Eigen/Dense>
#include <memory>
#include <unordered_map>
#include <vector>

#include "cfpos/channel.hpp"
#include "cfpos/scenario.hpp"

namespace cfpos {

using MatrixXcd = Eigen::MatrixXcd;
using MatrixXd = Eigen::MatrixXd;
using VectorXd = Eigen::VectorXd;

/// Mutually orthogonal pilot sequences with squared norm tau_p each. With
/// tau_p = K the UE->sequence assignment is the identity bijection and every
/// co-pilot set is a singleton.
struct PilotBook {
    MatrixXcd sequences;          // tau_p x tau_p, column k is phi_k
    std::vector<int> assignment;  // UE index -> sequence index

    static PilotBook make(int pilot_length);
};

/// Least-squares channel estimate from despread pilots: the true vector plus
/// white complex noise with per-element variance sigma2 / (p tau_p).
VectorXcd ls_estimate(const VectorXcd& h_true, double tx_power_w, int pilot_length,
                      double noise_power_w, RandomStream& rng);

/// Instantaneous pilot energy p tau ||h||^2.
double rss_instant(const VectorXcd& h, double tx_power_w, int pilot_length);

/// Hardened pilot energy N p tau beta (small-scale fading averaged out).
double rss_hardened(double beta, int antennas, double tx_power_w, int pilot_length);

/// N x N DFT matrix with entry (i, j) = exp(-j 2 pi i j / N); F F^H = N I.
MatrixXcd dft_matrix(int n);

/// Angular-domain response g = F h_hat.
VectorXcd angular_response(const VectorXcd& h_hat);

/// Closed-form angular-domain element for a noise-free channel: the LoS and
/// per-path Dirichlet-kernel terms evaluated directly from the link state and
/// the realization's fading coefficients. Row index is 0-based. Used as an
/// independent check of angular_response; the production path multiplies by F.
std::complex<double> closed_form_element(const LinkState& link, int antennas,
                                         double spacing_ratio, std::complex<double> phase,
                                         const std::vector<std::complex<double>>& path_gains,
                                         int row);

/// One column of the angular power matrix: empirical mean of |F h_hat|^2 over
/// `realizations` independent fading + estimation-noise draws.
VectorXd angular_power(const LinkState& link, int antennas, double spacing_ratio,
                       double tx_power_w, int pilot_length, double noise_power_w,
                       int realizations, RandomStream& rng);

enum class FeatureSource { measured, hypothesis };

/// Per-UE positioning fingerprint: RSS vector over APs and the N x M angular
/// power matrix, tagged with the position it was generated from.
struct FeatureSet {
    VectorXd rss;          // length M, nonnegative
    MatrixXd angular;      // N x M, nonnegative
    FeatureSource source = FeatureSource::measured;
    Vec2 position;
};

struct FeatureOptions {
    int realizations = 200;        // fading draws averaged into each angular column
    bool instantaneous_rss = false;  // use a single fading draw instead of the hardened value
    double cell_size = kAngleCellSize;
};

/// Deterministic feature synthesis for arbitrary positions in a scenario.
///
/// RSS follows the exact query geometry. The angular matrix is frozen per
/// position cell: geometry, scattering angles and the averaging draws are all
/// derived from the cell, so any two queries inside one cell return the same
/// matrix, and a query at a UE's own position reproduces the measured
/// features bit for bit. Columns are cached per (cell) across queries.
class FeatureGenerator {
  public:
    FeatureGenerator(const Scenario& scenario, FeatureOptions options = {});

    const Scenario& scenario() const { return *scenario_; }
    const FeatureOptions& options() const { return options_; }

    /// Features observed for UE k at its actual position.
    FeatureSet measured(int ue_index) const;

    /// Features a UE at `position` would produce. Rejects out-of-area queries.
    FeatureSet hypothesis(Vec2 position) const;

    /// RSS-only variant of hypothesis(); skips the angular matrix entirely.
    VectorXd hypothesis_rss(Vec2 position) const;

    std::size_t cache_size() const { return cache_.size(); }

  private:
    FeatureSet features_at(Vec2 position, FeatureSource source) const;
    const MatrixXd& angular_at_cell(std::uint64_t cell, Vec2 cell_center) const;
    Vec2 cell_center_of(Vec2 position) const;

    std::shared_ptr<const Scenario> scenario_;
    FeatureOptions options_;
    mutable std::unordered_map<std::uint64_t, MatrixXd> cache_;
};

}  // namespace cfpos
