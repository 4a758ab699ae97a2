#include <doctest.h>

#include "cfpos/similarity.hpp"

using namespace cfpos;
using doctest::Approx;

namespace {

MatrixXd columns(std::initializer_list<std::initializer_list<double>> cols) {
    const auto rows = static_cast<Eigen::Index>(cols.begin()->size());
    MatrixXd m(rows, static_cast<Eigen::Index>(cols.size()));
    Eigen::Index c = 0;
    for (const auto& col : cols) {
        Eigen::Index r = 0;
        for (double v : col) m(r++, c) = v;
        ++c;
    }
    return m;
}

}  // namespace

TEST_CASE("angle similarity of identical matrices") {
    const MatrixXd theta = columns({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}, {1, 0, 2}});
    const std::vector<int> subset{0, 1, 2, 3};
    const AngleSimilarity normalized = angle_similarity(theta, theta, subset);
    CHECK(normalized.aggregate == Approx(1.0).epsilon(1e-12));
    const AngleSimilarity as_written =
        angle_similarity(theta, theta, subset, AngleAggregate::as_written);
    CHECK(as_written.aggregate == Approx(2.0).epsilon(1e-12));  // 4 / sqrt(4)
    for (double c : normalized.per_ap) CHECK(c == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("angle similarity of disjoint supports is zero") {
    const MatrixXd a = columns({{1, 0, 2, 0}});
    const MatrixXd b = columns({{0, 3, 0, 4}});
    CHECK(angle_similarity(a, b, {0}).aggregate == 0.0);
}

TEST_CASE("zero-norm column is rejected with the AP index") {
    const MatrixXd a = columns({{1, 1}, {0, 0}});
    const MatrixXd b = columns({{1, 1}, {1, 1}});
    CHECK_THROWS_WITH_AS(angle_similarity(a, b, {0, 1}),
                         doctest::Contains("AP 1"), std::invalid_argument);
}

TEST_CASE("distance dissimilarity") {
    VectorXd a(3), b(3);
    a << 1, 2, 3;
    b << 1, 2, 3;
    CHECK(distance_dissimilarity(a, b, {0, 1, 2}) == 0.0);
    b << 1, 5, 3;
    CHECK(distance_dissimilarity(a, b, {1}) == Approx(3.0));
    b << 1, 5, 7;
    CHECK(distance_dissimilarity(a, b, {1, 2}) == Approx(5.0));  // 3-4-5
}

TEST_CASE("normalization maps the maximum to one") {
    CHECK(normalize_dissimilarity({2, 4}) == std::vector<double>{0.5, 1.0});
    CHECK(normalize_dissimilarity({5}) == std::vector<double>{1.0});
    CHECK(normalize_dissimilarity({0, 3}) == std::vector<double>{0.0, 1.0});
    CHECK_THROWS_AS(normalize_dissimilarity({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(normalize_dissimilarity({}), std::invalid_argument);
}

TEST_CASE("joint similarity values") {
    CHECK(joint_similarity(0.5, 0.5) == Approx(4.0).epsilon(1e-5));
    CHECK(joint_similarity(1.0, 0.0) == Approx(1.0).epsilon(1e-5));
    CHECK(joint_similarity(0.0, 1.0) == kJointCap);
    CHECK_THROWS_AS(joint_similarity(-0.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(joint_similarity(0.5, 1.2), std::invalid_argument);
}

TEST_CASE("joint similarity monotonicity on a random grid") {
    RandomStream rng(12);
    for (int i = 0; i < 400; ++i) {
        const double d = rng.uniform();
        const double a = rng.uniform();
        const double step = rng.uniform(0.0, 1.0 - a);
        CHECK(joint_similarity(d, a + step) >= joint_similarity(d, a));
        const double dstep = rng.uniform(0.0, 1.0 - d);
        CHECK(joint_similarity(d + dstep, a) <= joint_similarity(d, a));
    }
}

TEST_CASE("subset selection schemes") {
    const std::vector<double> coeffs{0.1, 0.9, 0.5, 0.7};
    CHECK(select_evaluation_subset(coeffs, 2, SubsetScheme::highest_similarity) ==
          std::vector<int>{1, 3});
    CHECK(select_evaluation_subset({0.4, 0.4, 0.4, 0.4}, 2, SubsetScheme::highest_similarity) ==
          std::vector<int>{0, 1});
    CHECK(select_evaluation_subset(coeffs, 4, SubsetScheme::highest_similarity) ==
          std::vector<int>{1, 3, 2, 0});
    CHECK_THROWS_AS(select_evaluation_subset(coeffs, 0, SubsetScheme::highest_similarity),
                    std::invalid_argument);
    CHECK_THROWS_AS(select_evaluation_subset(coeffs, 5, SubsetScheme::highest_similarity),
                    std::invalid_argument);

    const std::vector<double> distances{30.0, 5.0, 20.0, 10.0};
    CHECK(select_evaluation_subset(coeffs, 2, SubsetScheme::closest_distance, distances) ==
          std::vector<int>{1, 3});

    CHECK(select_evaluation_subset(coeffs, 2, SubsetScheme::threshold, {}, 0.5) ==
          std::vector<int>{1, 3, 2});
    CHECK(select_evaluation_subset(coeffs, 2, SubsetScheme::threshold, {}, 0.95).empty());
}

TEST_CASE("prefix consistency of the highest-similarity ranking") {
    RandomStream rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> coeffs(8);
        for (auto& c : coeffs) c = rng.uniform();
        const auto full =
            select_evaluation_subset(coeffs, 8, SubsetScheme::highest_similarity);
        for (int l = 1; l <= 8; ++l) {
            const auto prefix =
                select_evaluation_subset(coeffs, l, SubsetScheme::highest_similarity);
            CHECK(std::equal(prefix.begin(), prefix.end(), full.begin()));
        }
    }
}

TEST_CASE("scaling dissimilarities leaves the normalized ranking unchanged") {
    RandomStream rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> values(6);
        for (auto& v : values) v = rng.uniform(0.1, 5.0);
        const double c = rng.uniform(0.01, 50.0);
        std::vector<double> scaled = values;
        for (auto& v : scaled) v *= c;
        const auto a = normalize_dissimilarity(values);
        const auto b = normalize_dissimilarity(scaled);
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (std::size_t j = 0; j < a.size(); ++j) {
                CHECK((a[i] < a[j]) == (b[i] < b[j]));
            }
        }
    }
}

TEST_CASE("normalized aggregate is 1 exactly when subset columns are proportional") {
    RandomStream rng(41);
    MatrixXd theta(4, 3);
    for (int c = 0; c < 3; ++c) {
        for (int r = 0; r < 4; ++r) theta(r, c) = rng.uniform(0.1, 2.0);
    }
    MatrixXd scaled = theta;
    scaled.col(0) *= 3.0;
    scaled.col(1) *= 0.25;
    scaled.col(2) *= 7.0;
    const AngleSimilarity sim = angle_similarity(theta, scaled, {0, 1, 2});
    CHECK(sim.aggregate == Approx(1.0).epsilon(1e-12));

    MatrixXd skewed = scaled;
    skewed(0, 1) += 1.0;
    CHECK(angle_similarity(theta, skewed, {0, 1, 2}).aggregate < 1.0);
}

TEST_CASE("similarity grid peaks at the queried cell") {
    ScenarioConfig cfg;
    cfg.ap_count = 5;
    cfg.ue_count = 2;
    cfg.pilot_length = 2;
    cfg.antennas_per_ap = 4;
    cfg.seed = 61;
    const Scenario s = Scenario::build(cfg);
    FeatureOptions opts;
    opts.realizations = 40;
    const FeatureGenerator gen(s, opts);

    const Vec2 ue = s.placement().ue_xy[0];
    const SimilarityGrid grid = similarity_grid(gen, ue, ue, 1.0, 11);
    const std::size_t best = grid.argmax_joint();
    const double dx = grid.x[best] - ue.x;
    const double dy = grid.y[best] - ue.y;
    CHECK(std::sqrt(dx * dx + dy * dy) <= std::sqrt(0.5) + 1e-9);
    CHECK(grid.size() == 121);
}
