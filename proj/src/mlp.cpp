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

#include "cfpos/mlp.hpp"

#include <cmath>

namespace cfpos {

void MlpGradients::accumulate(const MlpGradients& other, double scale) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        weights[l] += scale * other.weights[l];
        biases[l] += scale * other.biases[l];
    }
}

Mlp Mlp::make(const std::vector<int>& layer_sizes, OutputActivation out_act, RandomStream& rng) {
    if (layer_sizes.size() < 2) throw std::invalid_argument("mlp: need at least input and output");
    for (int s : layer_sizes) {
        if (s < 1) throw std::invalid_argument("mlp: layer sizes must be >= 1");
    }
    Mlp net;
    net.out_act_ = out_act;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const int fan_in = layer_sizes[l];
        const int fan_out = layer_sizes[l + 1];
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        MatrixXd w(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r) {
            for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-limit, limit);
        }
        net.weights_.push_back(std::move(w));
        net.biases_.push_back(VectorXd::Zero(fan_out));
    }
    return net;
}

std::vector<int> Mlp::layer_sizes() const {
    std::vector<int> sizes;
    sizes.push_back(input_size());
    for (const auto& w : weights_) sizes.push_back(static_cast<int>(w.rows()));
    return sizes;
}

namespace {

void apply_leaky(MatrixXd& z) {
    z = z.unaryExpr([](double v) { return v > 0.0 ? v : kLeakySlope * v; });
}

// Derivative recovered from the post-activation value (slope is positive, so
// the sign survives the nonlinearity).
double leaky_derivative_from_output(double y) { return y > 0.0 ? 1.0 : kLeakySlope; }

}  // namespace

MatrixXd Mlp::forward_batch(const MatrixXd& input, MlpCache* cache) const {
    if (input.cols() != input_size()) throw std::invalid_argument("mlp: input width mismatch");
    if (cache) {
        cache->activations.clear();
        cache->activations.push_back(input);
    }
    MatrixXd a = input;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        MatrixXd z = a * weights_[l].transpose();
        z.rowwise() += biases_[l].transpose();
        const bool last = l + 1 == weights_.size();
        if (!last) {
            apply_leaky(z);
        } else if (out_act_ == OutputActivation::squash) {
            z = z.array().tanh();
        }
        a = std::move(z);
        if (cache) cache->activations.push_back(a);
    }
    return a;
}

VectorXd Mlp::forward(const VectorXd& input, MlpCache* cache) const {
    return forward_batch(input.transpose(), cache).row(0);
}

MlpGradients Mlp::backward_batch(const MlpCache& cache, const MatrixXd& upstream) const {
    if (cache.activations.size() != weights_.size() + 1) {
        throw std::invalid_argument("mlp: cache does not match network depth");
    }
    if (upstream.rows() != cache.activations.front().rows() ||
        upstream.cols() != output_size()) {
        throw std::invalid_argument("mlp: upstream shape mismatch");
    }
    MlpGradients grads;
    grads.weights.resize(weights_.size());
    grads.biases.resize(weights_.size());

    MatrixXd delta = upstream;
    for (std::size_t idx = weights_.size(); idx-- > 0;) {
        const MatrixXd& out = cache.activations[idx + 1];
        const bool last = idx + 1 == weights_.size();
        if (!last) {
            delta = delta.cwiseProduct(
                out.unaryExpr([](double y) { return leaky_derivative_from_output(y); }));
        } else if (out_act_ == OutputActivation::squash) {
            delta = delta.cwiseProduct(out.unaryExpr([](double y) { return 1.0 - y * y; }));
        }
        grads.weights[idx].noalias() = delta.transpose() * cache.activations[idx];
        grads.biases[idx] = delta.colwise().sum().transpose();
        if (idx > 0) {
            delta = delta * weights_[idx];
        } else {
            grads.input.noalias() = delta * weights_[0];
        }
    }
    return grads;
}

MlpGradients Mlp::backward(const MlpCache& cache, const VectorXd& upstream) const {
    return backward_batch(cache, upstream.transpose());
}

void Mlp::apply_step(const MlpGradients& grads, double learning_rate, double ascend) {
    const double scale = learning_rate * ascend;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        weights_[l] += scale * grads.weights[l];
        biases_[l] += scale * grads.biases[l];
    }
}

std::size_t Mlp::parameter_count() const {
    std::size_t count = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        count += static_cast<std::size_t>(weights_[l].size()) + biases_[l].size();
    }
    return count;
}

VectorXd Mlp::flatten_parameters() const {
    VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index pos = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) {
            for (Eigen::Index r = 0; r < weights_[l].rows(); ++r) flat(pos++) = weights_[l](r, c);
        }
        for (Eigen::Index r = 0; r < biases_[l].size(); ++r) flat(pos++) = biases_[l](r);
    }
    return flat;
}

void Mlp::set_parameters(const VectorXd& flat) {
    if (flat.size() != static_cast<Eigen::Index>(parameter_count())) {
        throw std::invalid_argument("mlp: flat parameter size mismatch");
    }
    Eigen::Index pos = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        for (Eigen::Index c = 0; c < weights_[l].cols(); ++c) {
            for (Eigen::Index r = 0; r < weights_[l].rows(); ++r) weights_[l](r, c) = flat(pos++);
        }
        for (Eigen::Index r = 0; r < biases_[l].size(); ++r) biases_[l](r) = flat(pos++);
    }
}

bool Mlp::parameters_finite() const {
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        if (!weights_[l].allFinite() || !biases_[l].allFinite()) return false;
    }
    return true;
}

void soft_update(Mlp& target, const Mlp& current, double tau, bool swap_convention) {
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("soft_update: tau outside [0, 1]");
    const double on_target = swap_convention ? 1.0 - tau : tau;
    VectorXd mixed = on_target * target.flatten_parameters() +
                     (1.0 - on_target) * current.flatten_parameters();
    target.set_parameters(mixed);
}

}  // namespace cfpos
