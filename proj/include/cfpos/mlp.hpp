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
#include <vector>

#include "cfpos/rng.hpp"

namespace cfpos {

using MatrixXd = Eigen::MatrixXd;
using VectorXd = Eigen::VectorXd;

/// Output nonlinearity; hidden layers are always leaky rectifiers (slope 0.01).
enum class OutputActivation { identity, squash };

inline constexpr double kLeakySlope = 0.01;

struct MlpCache {
    std::vector<MatrixXd> activations;  // activations[0] is the input batch
};

struct MlpGradients {
    std::vector<MatrixXd> weights;
    std::vector<VectorXd> biases;
    MatrixXd input;  // batch x input_size

    void accumulate(const MlpGradients& other, double scale = 1.0);
};

/// Dense multi-layer perceptron with exact reverse-mode gradients.
/// Batches are row-major (one sample per row).
class Mlp {
  public:
    static Mlp make(const std::vector<int>& layer_sizes, OutputActivation out_act,
                    RandomStream& rng);

    int input_size() const { return static_cast<int>(weights_.front().cols()); }
    int output_size() const { return static_cast<int>(weights_.back().rows()); }
    OutputActivation output_activation() const { return out_act_; }
    const std::vector<MatrixXd>& weights() const { return weights_; }
    const std::vector<VectorXd>& biases() const { return biases_; }
    std::vector<int> layer_sizes() const;

    MatrixXd forward_batch(const MatrixXd& input, MlpCache* cache = nullptr) const;
    VectorXd forward(const VectorXd& input, MlpCache* cache = nullptr) const;

    /// Reverse pass from an upstream batch gradient; the cache must come from
    /// the matching forward_batch call.
    MlpGradients backward_batch(const MlpCache& cache, const MatrixXd& upstream) const;
    MlpGradients backward(const MlpCache& cache, const VectorXd& upstream) const;

    /// In-place gradient step: ascend > 0 maximizes, < 0 minimizes.
    void apply_step(const MlpGradients& grads, double learning_rate, double ascend);

    std::size_t parameter_count() const;
    VectorXd flatten_parameters() const;
    void set_parameters(const VectorXd& flat);
    bool parameters_finite() const;

  private:
    std::vector<MatrixXd> weights_;  // weights_[l]: out x in
    std::vector<VectorXd> biases_;
    OutputActivation out_act_ = OutputActivation::identity;
};

/// target <- tau * target + (1 - tau) * current, element-wise. The weight on
/// the old target is tau, matching the update rule this project realizes; use
/// swap_convention to weight the current network by tau instead.
void soft_update(Mlp& target, const Mlp& current, double tau, bool swap_convention = false);

}  // namespace cfpos
