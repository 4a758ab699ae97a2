#include <doctest.h>

#include "cfpos/channel.hpp"

#include "test_util.hpp"

using namespace cfpos;
using doctest::Approx;

TEST_CASE("steering vector closed forms") {
    const VectorXcd broadside = steering_vector(kPi / 2.0, 5, 0.5);
    for (int n = 0; n < 5; ++n) {
        CHECK(broadside(n).real() == Approx(1.0).epsilon(1e-12));
        CHECK(broadside(n).imag() == Approx(0.0).epsilon(1e-12));
    }

    const VectorXcd endfire = steering_vector(0.0, 2, 0.5);
    CHECK(endfire(0).real() == Approx(1.0));
    CHECK(endfire(1).real() == Approx(-1.0));
    CHECK(endfire(1).imag() == Approx(0.0).epsilon(1e-12));

    const VectorXcd sixty = steering_vector(kPi / 3.0, 4, 0.5);  // cos = 1/2, step -pi/2
    CHECK(sixty(0) == std::complex<double>(1.0, 0.0));
    CHECK(sixty(1).imag() == Approx(-1.0));
    CHECK(sixty(2).real() == Approx(-1.0));
    CHECK(sixty(3).imag() == Approx(1.0));
}

TEST_CASE("steering vector norm is sqrt(N) for any angle") {
    RandomStream rng(21);
    for (int i = 0; i < 100; ++i) {
        const int n = 1 + static_cast<int>(rng.uniform_index(16));
        const double theta = rng.uniform(0.0, kPi);
        const VectorXcd a = steering_vector(theta, n, 0.5);
        CHECK(a.squaredNorm() == Approx(static_cast<double>(n)).epsilon(1e-12));
        CHECK(std::abs(a(0) - std::complex<double>(1.0, 0.0)) < 1e-15);
    }
}

namespace {

LinkState make_link(double beta, double kappa, double los_angle, std::vector<double> nlos) {
    LinkState link;
    link.beta = beta;
    link.kappa = kappa;
    link.los_angle = los_angle;
    link.nlos_angles = std::move(nlos);
    link.distance = 25.0;
    return link;
}

}  // namespace

TEST_CASE("LoS-dominant limit matches the steering direction") {
    const LinkState link = make_link(2.0, 1e12, 0.7, {0.3, 1.1, 2.2});
    RandomStream rng(5);
    const ChannelDraw draw = draw_channel(link, 8, 0.5, rng);
    const VectorXcd expected = draw.phase * steering_vector(0.7, 8, 0.5) / std::sqrt(8.0);
    const VectorXcd got = draw.h / draw.h.norm();
    CHECK((got - expected).norm() < 1e-5);
}

TEST_CASE("Monte Carlo channel energy matches N beta at kappa 0") {
    const LinkState link = make_link(3.7, 0.0, 0.4, {0.3, 1.1, 2.2, 2.9});
    RandomStream rng(17);
    const int draws = 100000;
    double acc = 0.0;
    for (int i = 0; i < draws; ++i) acc += draw_channel(link, 4, 0.5, rng).h.squaredNorm();
    const double mean_per_antenna = acc / draws / 4.0;
    CHECK(std::fabs(mean_per_antenna / link.beta - 1.0) < 0.02);
}

TEST_CASE("Monte Carlo channel energy matches N beta under Rician mixing") {
    const LinkState link = make_link(0.8, 3.0, 1.9, {0.5, 2.5});
    RandomStream rng(23);
    const int draws = 100000;
    double acc = 0.0;
    for (int i = 0; i < draws; ++i) acc += draw_channel(link, 4, 0.5, rng).h.squaredNorm();
    CHECK(std::fabs(acc / draws / (4.0 * link.beta) - 1.0) < 0.02);
}

TEST_CASE("zero gain gives the zero vector") {
    const LinkState link = make_link(0.0, 0.0, 0.4, {1.0});
    RandomStream rng(2);
    CHECK(draw_channel(link, 4, 0.5, rng).h.norm() == 0.0);
}

TEST_CASE("same stream state reproduces the draw") {
    const LinkState link = make_link(1.0, 2.0, 0.9, {0.2, 0.8});
    RandomStream a(99);
    RandomStream b(99);
    const ChannelDraw da = draw_channel(link, 6, 0.5, a);
    const ChannelDraw db = draw_channel(link, 6, 0.5, b);
    CHECK(exact_equal(da.h, db.h));
    CHECK(da.phase == db.phase);
}

TEST_CASE("block realizations are reproducible and block-dependent") {
    ScenarioConfig cfg;
    cfg.ap_count = 2;
    cfg.ue_count = 2;
    cfg.pilot_length = 2;
    cfg.seed = 31;
    const Scenario s = Scenario::build(cfg);
    const ChannelRealization r0 = draw_realization(s, 0);
    const ChannelRealization r0_again = draw_realization(s, 0);
    const ChannelRealization r1 = draw_realization(s, 1);
    CHECK(exact_equal(r0.at(1, 1, 2).h, r0_again.at(1, 1, 2).h));
    CHECK(!exact_equal(r0.at(1, 1, 2).h, r1.at(1, 1, 2).h));
}
