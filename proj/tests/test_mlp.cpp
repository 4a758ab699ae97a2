#include <doctest.h>

#include <functional>

#include "cfpos/mlp.hpp"
#include "test_util.hpp"

using namespace cfpos;
using doctest::Approx;

namespace {

Mlp random_net(const std::vector<int>& sizes, OutputActivation act, std::uint64_t seed) {
    RandomStream rng(seed);
    Mlp net = Mlp::make(sizes, act, rng);
    // Nonzero biases so gradient checks exercise them.
    VectorXd flat = net.flatten_parameters();
    for (Eigen::Index i = 0; i < flat.size(); ++i) flat(i) += 0.01 * ((i % 7) - 3);
    net.set_parameters(flat);
    return net;
}

/// Central finite differences of scalar(theta) at the net's parameters.
VectorXd finite_difference(Mlp& net, const std::function<double()>& scalar, double step) {
    const VectorXd theta = net.flatten_parameters();
    VectorXd grad(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        VectorXd plus = theta;
        plus(i) += step;
        net.set_parameters(plus);
        const double up = scalar();
        VectorXd minus = theta;
        minus(i) -= step;
        net.set_parameters(minus);
        const double down = scalar();
        grad(i) = (up - down) / (2.0 * step);
    }
    net.set_parameters(theta);
    return grad;
}

bool gradients_match(const VectorXd& analytic, const VectorXd& numeric, double tol) {
    for (Eigen::Index i = 0; i < analytic.size(); ++i) {
        const double scale = std::max({1.0, std::fabs(analytic(i)), std::fabs(numeric(i))});
        if (std::fabs(analytic(i) - numeric(i)) > tol * scale) return false;
    }
    return true;
}

VectorXd flatten_grads(const Mlp& net, const MlpGradients& grads) {
    VectorXd flat(static_cast<Eigen::Index>(net.parameter_count()));
    Eigen::Index pos = 0;
    for (std::size_t l = 0; l < grads.weights.size(); ++l) {
        for (Eigen::Index c = 0; c < grads.weights[l].cols(); ++c) {
            for (Eigen::Index r = 0; r < grads.weights[l].rows(); ++r) {
                flat(pos++) = grads.weights[l](r, c);
            }
        }
        for (Eigen::Index r = 0; r < grads.biases[l].size(); ++r) flat(pos++) = grads.biases[l](r);
    }
    return flat;
}

}  // namespace

TEST_CASE("zero parameters give zero output") {
    RandomStream rng(1);
    Mlp net = Mlp::make({3, 5, 2}, OutputActivation::identity, rng);
    net.set_parameters(VectorXd::Zero(static_cast<Eigen::Index>(net.parameter_count())));
    VectorXd x(3);
    x << 1.0, -2.0, 0.5;
    CHECK(net.forward(x).norm() == 0.0);
}

TEST_CASE("single linear layer is W x + b") {
    RandomStream rng(2);
    Mlp net = Mlp::make({3, 2}, OutputActivation::identity, rng);
    MatrixXd w(2, 3);
    w << 1, 2, 3, 4, 5, 6;
    VectorXd b(2);
    b << 0.5, -0.5;
    VectorXd flat(8);
    flat << 1, 4, 2, 5, 3, 6, 0.5, -0.5;  // column-major W then b
    net.set_parameters(flat);
    VectorXd x(3);
    x << 1, 1, 1;
    const VectorXd y = net.forward(x);
    CHECK(y(0) == Approx(6.5));
    CHECK(y(1) == Approx(14.5));
}

TEST_CASE("leaky slope is 0.01 on hidden layers") {
    RandomStream rng(3);
    Mlp net = Mlp::make({1, 1, 1}, OutputActivation::identity, rng);
    VectorXd flat(4);
    flat << 1.0, 0.0, 1.0, 0.0;  // W0=1, b0=0, W1=1, b1=0
    net.set_parameters(flat);
    VectorXd x(1);
    x << -1.0;
    CHECK(net.forward(x)(0) == Approx(-0.01));
    x << 2.0;
    CHECK(net.forward(x)(0) == Approx(2.0));
}

TEST_CASE("linear net gradients: dW = upstream outer x, db = upstream") {
    RandomStream rng(4);
    Mlp net = Mlp::make({3, 1}, OutputActivation::identity, rng);
    VectorXd x(3);
    x << 2.0, -1.0, 0.5;
    MlpCache cache;
    net.forward(x, &cache);
    VectorXd upstream(1);
    upstream << 1.0;
    const MlpGradients grads = net.backward(cache, upstream);
    CHECK(grads.weights[0](0, 0) == Approx(2.0));
    CHECK(grads.weights[0](0, 1) == Approx(-1.0));
    CHECK(grads.weights[0](0, 2) == Approx(0.5));
    CHECK(grads.biases[0](0) == Approx(1.0));
}

TEST_CASE("zero upstream gives zero gradients") {
    Mlp net = random_net({4, 6, 3}, OutputActivation::squash, 5);
    VectorXd x(4);
    x << 0.3, -0.2, 1.0, 0.7;
    MlpCache cache;
    net.forward(x, &cache);
    const MlpGradients grads = net.backward(cache, VectorXd::Zero(3));
    CHECK(flatten_grads(net, grads).norm() == 0.0);
    CHECK(grads.input.norm() == 0.0);
}

TEST_CASE("reverse-mode gradients match finite differences") {
    RandomStream data_rng(6);
    for (int trial = 0; trial < 6; ++trial) {
        const OutputActivation act =
            trial % 2 == 0 ? OutputActivation::identity : OutputActivation::squash;
        Mlp net = random_net({4, 8, 5, 3}, act, 100 + trial);
        VectorXd x(4);
        for (int i = 0; i < 4; ++i) x(i) = data_rng.uniform(-1.0, 1.0);
        VectorXd upstream(3);
        for (int i = 0; i < 3; ++i) upstream(i) = data_rng.uniform(-1.0, 1.0);

        MlpCache cache;
        net.forward(x, &cache);
        const MlpGradients grads = net.backward(cache, upstream);
        const VectorXd analytic = flatten_grads(net, grads);

        auto scalar = [&]() { return upstream.dot(net.forward(x)); };
        const VectorXd numeric = finite_difference(net, scalar, 1e-5);
        CHECK(gradients_match(analytic, numeric, 1e-4));
    }
}

TEST_CASE("input gradients match finite differences") {
    Mlp net = random_net({3, 6, 2}, OutputActivation::squash, 8);
    VectorXd x(3);
    x << 0.4, -0.9, 0.2;
    VectorXd upstream(2);
    upstream << 0.7, -0.3;
    MlpCache cache;
    net.forward(x, &cache);
    const MlpGradients grads = net.backward(cache, upstream);
    const double step = 1e-6;
    for (int i = 0; i < 3; ++i) {
        VectorXd xp = x;
        xp(i) += step;
        VectorXd xm = x;
        xm(i) -= step;
        const double numeric = (upstream.dot(net.forward(xp)) - upstream.dot(net.forward(xm))) /
                               (2.0 * step);
        CHECK(grads.input(0, i) == Approx(numeric).epsilon(1e-4));
    }
}

TEST_CASE("batch forward equals per-sample forward") {
    Mlp net = random_net({3, 7, 2}, OutputActivation::squash, 9);
    RandomStream rng(10);
    MatrixXd batch(5, 3);
    for (int r = 0; r < 5; ++r) {
        for (int c = 0; c < 3; ++c) batch(r, c) = rng.uniform(-1, 1);
    }
    const MatrixXd out = net.forward_batch(batch);
    for (int r = 0; r < 5; ++r) {
        const VectorXd single = net.forward(batch.row(r).transpose());
        CHECK((out.row(r).transpose() - single).norm() < 1e-14);
    }
}

TEST_CASE("soft update mixes parameters") {
    RandomStream rng(11);
    Mlp target = Mlp::make({2, 3, 1}, OutputActivation::identity, rng);
    Mlp current = Mlp::make({2, 3, 1}, OutputActivation::identity, rng);

    SUBCASE("tau 0 copies the current network") {
        Mlp t = target;
        soft_update(t, current, 0.0);
        CHECK(exact_equal(t.flatten_parameters(), current.flatten_parameters()));
    }
    SUBCASE("tau 1 keeps the target") {
        Mlp t = target;
        const VectorXd before = t.flatten_parameters();
        soft_update(t, current, 1.0);
        CHECK(exact_equal(t.flatten_parameters(), before));
    }
    SUBCASE("scalar arithmetic: tau weights the old target") {
        Mlp t = target;
        t.set_parameters(VectorXd::Zero(t.flatten_parameters().size()));
        Mlp c = current;
        c.set_parameters(VectorXd::Constant(c.flatten_parameters().size(), 10.0));
        soft_update(t, c, 0.99);
        CHECK(t.flatten_parameters()(0) == Approx(0.1));
    }
    SUBCASE("swapped convention weights the current network by tau") {
        Mlp t = target;
        t.set_parameters(VectorXd::Zero(t.flatten_parameters().size()));
        Mlp c = current;
        c.set_parameters(VectorXd::Constant(c.flatten_parameters().size(), 10.0));
        soft_update(t, c, 0.99, true);
        CHECK(t.flatten_parameters()(0) == Approx(9.9));
    }
    SUBCASE("every parameter stays within the convex envelope") {
        Mlp t = target;
        const VectorXd before = t.flatten_parameters();
        const VectorXd cur = current.flatten_parameters();
        soft_update(t, current, 0.3);
        const VectorXd after = t.flatten_parameters();
        for (Eigen::Index i = 0; i < after.size(); ++i) {
            CHECK(after(i) >= std::min(before(i), cur(i)) - 1e-15);
            CHECK(after(i) <= std::max(before(i), cur(i)) + 1e-15);
        }
    }
}

TEST_CASE("flatten and restore round trip") {
    Mlp net = random_net({4, 5, 3}, OutputActivation::identity, 12);
    const VectorXd flat = net.flatten_parameters();
    Mlp other = random_net({4, 5, 3}, OutputActivation::identity, 13);
    other.set_parameters(flat);
    CHECK(exact_equal(other.flatten_parameters(), flat));
    CHECK(net.parameters_finite());
}
