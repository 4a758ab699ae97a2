#include <doctest.h>

#include "cfpos/rng.hpp"

using namespace cfpos;

TEST_CASE("identical seeds produce identical sequences") {
    RandomStream a(42);
    RandomStream b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("substreams are addressable and independent of parent position") {
    RandomStream parent(7);
    RandomStream s1 = parent.substream(1);
    parent.next_u64();
    parent.next_u64();
    RandomStream s2 = parent.substream(1);
    CHECK(s1.next_u64() == s2.next_u64());

    RandomStream other = parent.substream(2);
    RandomStream s3 = parent.substream(1);
    s3.next_u64();
    CHECK(other.next_u64() != s3.next_u64());
}

TEST_CASE("uniform stays in [0, 1) and fills the range") {
    RandomStream rng(3);
    double lo = 1.0;
    double hi = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("gaussian moments") {
    RandomStream rng(11);
    const int n = 200000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sum_sq += g * g;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.02);
    CHECK(std::fabs(var - 1.0) < 0.03);
}

TEST_CASE("complex gaussian has unit second moment") {
    RandomStream rng(13);
    const int n = 200000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += std::norm(rng.complex_gaussian());
    CHECK(std::fabs(acc / n - 1.0) < 0.02);
}

TEST_CASE("uniform_index covers [0, n)") {
    RandomStream rng(5);
    std::array<int, 7> counts{};
    for (int i = 0; i < 7000; ++i) counts[rng.uniform_index(7)]++;
    for (int c : counts) CHECK(c > 700);
}
