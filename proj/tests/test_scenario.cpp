#include <doctest.h>

#include "cfpos/io.hpp"
#include "cfpos/scenario.hpp"

using namespace cfpos;
using doctest::Approx;

TEST_CASE("noise budget: 20 MHz and 7 dB figure give -94 dBm") {
    const double w = noise_power_watt(20e6, 7.0);
    const double dbm = watt_to_dbm(w);
    CHECK(dbm == Approx(-174.0 + 10.0 * std::log10(20e6) + 7.0).epsilon(1e-12));
    CHECK(dbm == Approx(-94.0).epsilon(0.0003));  // -93.99 rounds to the quoted budget
}

TEST_CASE("wrap distance") {
    CHECK(wrap_distance({0, 0}, {99, 0}, 100, 0) == Approx(1.0));
    CHECK(wrap_distance({12.5, 7}, {12.5, 7}, 100, 10) == Approx(10.0));
    CHECK(wrap_distance({0, 0}, {50, 50}, 100, 10) == Approx(std::sqrt(5100.0)));
    // symmetry and lower bound
    RandomStream rng(4);
    for (int i = 0; i < 200; ++i) {
        const Vec2 p{rng.uniform(0, 100), rng.uniform(0, 100)};
        const Vec2 q{rng.uniform(0, 100), rng.uniform(0, 100)};
        const double pq = wrap_distance(p, q, 100, 10);
        CHECK(pq == Approx(wrap_distance(q, p, 100, 10)));
        CHECK(pq >= 10.0);
    }
}

TEST_CASE("three-slope path loss") {
    CHECK(path_loss_db(100.0) == Approx(-105.7).epsilon(1e-12));
    CHECK(path_loss_db(10.0) == Approx(path_loss_db(10.0 - 1e-9)));
    CHECK(path_loss(4.0) == Approx(path_loss(9.0)));  // flat below d0
    CHECK_THROWS_AS(path_loss_db(0.0), std::invalid_argument);
    CHECK_THROWS_AS(path_loss_db(-1.0), std::invalid_argument);

    RandomStream rng(9);
    for (int i = 0; i < 500; ++i) {
        const double d1 = rng.uniform(0.1, 200.0);
        const double d2 = d1 + rng.uniform(0.0, 50.0);
        CHECK(path_loss(d1) >= path_loss(d2));
    }
}

TEST_CASE("rician factor") {
    CHECK(rician_factor(100.0, true) == Approx(10.0));
    CHECK(rician_factor(321.0, false) == 0.0);
    CHECK(rician_factor(0.0, true) == Approx(std::pow(10.0, 1.3)));
    for (double d = 0.0; d < 200.0; d += 7.0) {
        CHECK(rician_factor(d, true) > rician_factor(d + 1.0, true));
    }
}

TEST_CASE("scenario build is deterministic byte for byte") {
    ScenarioConfig cfg;
    cfg.seed = 77;
    const Scenario a = Scenario::build(cfg);
    const Scenario b = Scenario::build(cfg);
    CHECK(io::scenario_to_json(a).dump() == io::scenario_to_json(b).dump());
}

TEST_CASE("pure vertical separation") {
    ScenarioConfig cfg;
    cfg.ap_count = 1;
    cfg.ue_count = 1;
    cfg.pilot_length = 1;
    cfg.height_gap = 10.0;
    Placement placement;
    placement.ap_xy = {{50, 50}};
    placement.ue_xy = {{50, 50}};
    const Scenario s = Scenario::from_parts(cfg, placement);
    CHECK(s.link(0, 0).distance == Approx(10.0));
    CHECK(s.link(0, 0).los_angle == Approx(kPi / 2.0));
}

TEST_CASE("config rejections") {
    ScenarioConfig cfg;
    cfg.pilot_length = cfg.ue_count + 1;
    CHECK_THROWS_AS(Scenario::build(cfg), std::invalid_argument);
    cfg = {};
    cfg.ap_count = 0;
    CHECK_THROWS_AS(Scenario::build(cfg), std::invalid_argument);
    cfg = {};
    cfg.area_side = -5;
    CHECK_THROWS_AS(Scenario::build(cfg), std::invalid_argument);
    cfg = {};
    cfg.tx_power_w = 0.0;
    CHECK_THROWS_AS(Scenario::build(cfg), std::invalid_argument);
}

TEST_CASE("all path angles live in [0, pi]") {
    ScenarioConfig cfg;
    cfg.seed = 123;
    cfg.ap_count = 6;
    cfg.ue_count = 4;
    cfg.pilot_length = 4;
    const Scenario s = Scenario::build(cfg);
    for (int m = 0; m < s.ap_count(); ++m) {
        for (int k = 0; k < s.ue_count(); ++k) {
            const LinkState& link = s.link(m, k);
            CHECK(link.los_angle >= 0.0);
            CHECK(link.los_angle <= kPi);
            CHECK(link.nlos_angles.size() == static_cast<std::size_t>(cfg.paths_per_link));
            for (double a : link.nlos_angles) {
                CHECK(a >= 0.0);
                CHECK(a <= kPi);
            }
            CHECK(link.beta > 0.0);
            CHECK(link.kappa == 0.0);  // default mode is NLoS everywhere
        }
    }
}

TEST_CASE("los mode governs kappa") {
    ScenarioConfig cfg;
    cfg.los_mode = LosMode::always_los;
    const Scenario s = Scenario::build(cfg);
    CHECK(s.link(0, 0).kappa > 0.0);

    cfg.los_mode = LosMode::probabilistic;
    const Scenario p = Scenario::build(cfg);
    for (int m = 0; m < p.ap_count(); ++m) {
        for (int k = 0; k < p.ue_count(); ++k) {
            const LinkState& link = p.link(m, k);
            const bool los = link.distance <= cfg.los_distance_threshold;
            CHECK((link.kappa > 0.0) == los);
        }
    }
}

TEST_CASE("relocating UEs matches a fresh build from the same parts") {
    ScenarioConfig cfg;
    cfg.seed = 5;
    const Scenario base = Scenario::build(cfg);
    std::vector<Vec2> moved = base.placement().ue_xy;
    moved[0] = {12.0, 34.0};
    const Scenario relocated = base.with_ue_positions(moved);
    Placement parts;
    parts.ap_xy = base.placement().ap_xy;
    parts.ue_xy = moved;
    const Scenario direct = Scenario::from_parts(cfg, parts);
    CHECK(io::scenario_to_json(relocated).dump() == io::scenario_to_json(direct).dump());
    CHECK_THROWS_AS(base.with_ue_positions({{1, 1}}), std::invalid_argument);
}

TEST_CASE("nlos angles are a pure function of seed, ap and cell") {
    const auto a = derive_nlos_angles(9, 2, position_cell({10.2, 20.8}), 6);
    const auto b = derive_nlos_angles(9, 2, position_cell({10.9, 20.1}), 6);
    const auto c = derive_nlos_angles(9, 2, position_cell({11.1, 20.1}), 6);
    CHECK(a == b);   // same 1 m cell
    CHECK(a != c);   // neighboring cell
    CHECK(a != derive_nlos_angles(9, 3, position_cell({10.2, 20.8}), 6));
    CHECK(a != derive_nlos_angles(8, 2, position_cell({10.2, 20.8}), 6));
}
