#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "tda/rng.hpp"

using tda::Rng;

TEST_CASE("same seed reproduces the same sequence") {
    Rng a(12345), b(12345);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("streams are independent of draw order and of each other") {
    Rng s0 = Rng::stream(7, 0);
    Rng s1 = Rng::stream(7, 1);
    Rng s0_again = Rng::stream(7, 0);
    const std::uint64_t first0 = s0.next_u64();
    const std::uint64_t first1 = s1.next_u64();
    CHECK(first0 != first1);
    CHECK(s0_again.next_u64() == first0);

    // Adjacent seeds and adjacent stream ids decorrelate through the mixer.
    CHECK(Rng::stream(7, 0).next_u64() != Rng::stream(8, 0).next_u64());
    CHECK(Rng::stream(7, 2).next_u64() != Rng::stream(7, 3).next_u64());
}

TEST_CASE("next_double lies in [0, 1)") {
    Rng r(99);
    for (int i = 0; i < 100000; ++i) {
        const double x = r.next_double();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("next_below respects the bound and is roughly uniform") {
    Rng r(4242);
    CHECK(r.next_below(1) == 0);

    const std::uint64_t buckets = 10;
    const int draws = 100000;
    std::vector<int> count(buckets, 0);
    for (int i = 0; i < draws; ++i) {
        const std::uint64_t v = r.next_below(buckets);
        REQUIRE(v < buckets);
        ++count[v];
    }
    // 4-sigma binomial window per bucket: mean 10000, sigma = sqrt(n p (1-p)) = 94.87.
    const double mean = draws / static_cast<double>(buckets);
    const double sigma = std::sqrt(draws * 0.1 * 0.9);
    for (std::uint64_t b = 0; b < buckets; ++b) {
        CHECK(count[b] > mean - 4.0 * sigma);
        CHECK(count[b] < mean + 4.0 * sigma);
    }
}

TEST_CASE("next_gaussian has unit-normal sample moments") {
    Rng r(31337);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = r.next_gaussian();
        sum += g;
        sumsq += g * g;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    // 4-sigma windows: sd(mean) = 1/sqrt(n), sd(var) ~ sqrt(2/n).
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("gaussian spare value does not leak across stream copies") {
    Rng a(5);
    (void)a.next_gaussian();  // caches a spare
    Rng b(5);
    // A fresh generator with the same seed replays the pair from the start.
    Rng c(5);
    CHECK(b.next_gaussian() == c.next_gaussian());
    CHECK(b.next_gaussian() == c.next_gaussian());
}
