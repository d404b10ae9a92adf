#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tda/estimators.hpp"
#include "tda/rng.hpp"
#include "tda/transport.hpp"
#include "test_util.hpp"

using namespace tda;

namespace {

PointCloud random_cloud(std::size_t n, std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> pts(n * dim);
    for (auto& x : pts) x = rng.next_gaussian();
    return PointCloud::from_points(pts, n, dim);
}

DiscreteMeasure measure_1d(std::vector<double> xs, std::vector<double> weights) {
    DiscreteMeasure mu;
    mu.support = PointCloud::from_points(xs, xs.size(), 1);
    mu.weights = std::move(weights);
    return mu;
}

}  // namespace

TEST_CASE("wasserstein hand values") {
    const DiscreteMeasure point0 = measure_1d({0.0}, {1.0});
    const DiscreteMeasure point1 = measure_1d({1.0}, {1.0});
    CHECK(wasserstein(point0, point1, 1.0) == 1.0);
    CHECK(wasserstein(point0, point1, 2.0) == 1.0);
    CHECK(wasserstein(point0, point0, 1.0) == 0.0);

    // Split source onto one sink: both halves travel distance 1.
    const DiscreteMeasure pair = measure_1d({0.0, 2.0}, {0.5, 0.5});
    CHECK(wasserstein(pair, point1, 1.0) == 1.0);
    CHECK(wasserstein(pair, point1, 2.0) == 1.0);

    // 0 -> 0 and 2 -> 1: half the mass moves distance 1.
    const DiscreteMeasure left = measure_1d({0.0, 1.0}, {0.5, 0.5});
    CHECK(wasserstein(pair, left, 1.0) == 0.5);
    CHECK(wasserstein(pair, left, 2.0) == std::sqrt(0.5));
}

TEST_CASE("uniform_measure and validation") {
    const PointCloud c = random_cloud(4, 2, 1);
    const DiscreteMeasure mu = uniform_measure(c);
    REQUIRE(mu.weights.size() == 4);
    for (double w : mu.weights) CHECK(w == 0.25);
    validate_measure(mu);

    DiscreteMeasure bad = mu;
    bad.weights[0] = -0.25;
    CHECK_TDA_ERROR(validate_measure(bad), "validation");
    bad = mu;
    bad.weights[0] = 0.5;  // sums to 1.25
    CHECK_TDA_ERROR(validate_measure(bad), "validation");
    bad = mu;
    bad.weights.pop_back();
    CHECK_TDA_ERROR(validate_measure(bad), "validation");

    CHECK_TDA_ERROR(wasserstein(mu, mu, 0.5), "validation");  // p >= 1
    const DiscreteMeasure other_dim = uniform_measure(random_cloud(4, 3, 2));
    CHECK_TDA_ERROR(wasserstein(mu, other_dim, 1.0), "validation");
}

TEST_CASE("flow, assignment, and permutation oracle agree on uniform pairs") {
    Rng rng(404);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.next_below(5));
        const DiscreteMeasure mu = uniform_measure(random_cloud(n, 2, 1000 + static_cast<std::uint64_t>(trial)));
        const DiscreteMeasure nu = uniform_measure(random_cloud(n, 2, 2000 + static_cast<std::uint64_t>(trial)));
        for (double p : {1.0, 2.0}) {
            const double via_assignment = wasserstein(mu, nu, p);  // equal-uniform short-circuit
            const double via_flow = wasserstein_flow(mu, nu, p, TransportParams{});
            const double via_oracle = oracles::oracle_wasserstein_permutation(mu.support, nu.support, p);
            CHECK(via_assignment == doctest::Approx(via_oracle).epsilon(1e-10));
            CHECK(via_flow == doctest::Approx(via_oracle).epsilon(1e-10));
        }
    }
}

TEST_CASE("general weights: split-atom invariance and symmetry") {
    Rng rng(505);
    const PointCloud support_a = random_cloud(5, 2, 7);
    const PointCloud support_b = random_cloud(3, 2, 8);
    DiscreteMeasure mu;
    mu.support = support_a;
    mu.weights = {0.1, 0.2, 0.3, 0.25, 0.15};
    DiscreteMeasure nu;
    nu.support = support_b;
    nu.weights = {0.5, 0.25, 0.25};

    for (double p : {1.0, 2.0}) {
        const double base = wasserstein(mu, nu, p);
        CHECK(base > 0.0);
        CHECK(wasserstein(nu, mu, p) == doctest::Approx(base).epsilon(1e-12));

        // Split mu's first atom into two co-located halves.
        DiscreteMeasure split;
        std::vector<double> pts;
        const auto p0 = support_a.point(0);
        pts.insert(pts.end(), p0.begin(), p0.end());
        for (std::size_t i = 0; i < support_a.size(); ++i) {
            const auto pi = support_a.point(i);
            pts.insert(pts.end(), pi.begin(), pi.end());
        }
        split.support = PointCloud::from_points(pts, 6, 2);
        split.weights = {0.05, 0.05, 0.2, 0.3, 0.25, 0.15};
        CHECK(wasserstein(split, nu, p) == doctest::Approx(base).epsilon(1e-12));

        // Measure against itself is at distance zero.
        CHECK(wasserstein(mu, mu, p) == 0.0);
    }
}

TEST_CASE("metric inequalities") {
    const DiscreteMeasure a = uniform_measure(random_cloud(4, 2, 31));
    const DiscreteMeasure b = uniform_measure(random_cloud(5, 2, 32));
    const DiscreteMeasure c = uniform_measure(random_cloud(6, 2, 33));
    const double ab = wasserstein(a, b, 1.0);
    const double bc = wasserstein(b, c, 1.0);
    const double ac = wasserstein(a, c, 1.0);
    CHECK(ac <= ab + bc + 1e-12);
    // Jensen: W_1 <= W_2 on the same pair.
    CHECK(wasserstein(a, b, 1.0) <= wasserstein(a, b, 2.0) + 1e-12);
}

TEST_CASE("moving one of N uniform atoms by distance 1 costs exactly 1/N") {
    // Shared points are 10 apart so the identity coupling is the unique optimum.
    const std::size_t n = 200;
    std::vector<double> xs(2 * n), ys(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[2 * i] = ys[2 * i] = 10.0 * static_cast<double>(i);
        xs[2 * i + 1] = ys[2 * i + 1] = 0.0;
    }
    ys[1] = 1.0;  // move the first atom from (0,0) to (0,1)
    const DiscreteMeasure mu = uniform_measure(PointCloud::from_points(xs, n, 2));
    const DiscreteMeasure nu = uniform_measure(PointCloud::from_points(ys, n, 2));

    CHECK(wasserstein(mu, nu, 1.0) == 1.0 / static_cast<double>(n));          // assignment path
    CHECK(wasserstein_flow(mu, nu, 1.0, TransportParams{}) == 1.0 / static_cast<double>(n));
    CHECK(wasserstein(mu, nu, 2.0) == std::sqrt(1.0 / static_cast<double>(n)));
}

TEST_CASE("support cap raises a budget error") {
    const DiscreteMeasure a = uniform_measure(random_cloud(300, 2, 41));
    const DiscreteMeasure b = uniform_measure(random_cloud(300, 2, 42));
    bool thrown = false;
    try {
        (void)wasserstein(a, b, 1.0);  // combined 600 > default cap 512
    } catch (const Error& e) {
        thrown = true;
        CHECK(e.code() == "transport-too-large");
        CHECK(e.is_budget());
    }
    CHECK(thrown);
    TransportParams roomy;
    roomy.support_cap = 1024;
    CHECK(wasserstein(a, b, 1.0, roomy) > 0.0);
}

TEST_CASE("scale_weights produces exact small-denominator integers") {
    std::vector<std::uint64_t> a, b;
    std::uint64_t total = 0;
    scale_weights({0.5, 0.5}, {1.0}, 1000000000ULL, a, b, total);
    CHECK(a == std::vector<std::uint64_t>{1, 1});
    CHECK(b == std::vector<std::uint64_t>{2});
    CHECK(total == 2);

    const double third = 1.0 / 3.0;
    scale_weights({third, third, third}, {0.5, 0.5}, 1000000000ULL, a, b, total);
    CHECK(a == std::vector<std::uint64_t>{2, 2, 2});
    CHECK(b == std::vector<std::uint64_t>{3, 3});
    CHECK(total == 6);

    // Fallback path still conserves mass exactly.
    const double w = 1.0 / std::sqrt(2.0);
    scale_weights({w, 1.0 - w}, {0.25, 0.75}, 1000000ULL, a, b, total);
    std::uint64_t sum_a = 0, sum_b = 0;
    for (auto x : a) sum_a += x;
    for (auto x : b) sum_b += x;
    CHECK(sum_a == total);
    CHECK(sum_b == total);
}

TEST_CASE("stability verifier produces a coherent report") {
    // Two overlapping uniform measures on 40 points each.
    const PointCloud base = random_cloud(40, 2, 61);
    std::vector<double> shifted(base.size() * 2);
    for (std::size_t i = 0; i < base.size(); ++i) {
        const auto p = base.point(i);
        shifted[2 * i] = p[0] + 0.05;
        shifted[2 * i + 1] = p[1];
    }
    const DiscreteMeasure mu = uniform_measure(base);
    const DiscreteMeasure nu = uniform_measure(PointCloud::from_points(shifted, base.size(), 2));

    PipelineParams pipeline;
    pipeline.grid = 128;
    pipeline.rips.max_dim = 1;
    const StabilityReport r = verify_stability_wasserstein(mu, nu, 15, 1.0, 30, 7, pipeline);
    CHECK(r.trials == 30);
    CHECK(r.m == 15);
    CHECK(r.p == 1.0);
    CHECK(r.w_distance == doctest::Approx(wasserstein(mu, nu, 1.0)).epsilon(1e-12));
    CHECK(r.rhs == doctest::Approx(15.0 * r.w_distance).epsilon(1e-12));
    CHECK(r.grid_error > 0.0);
    CHECK(r.mc_stderr >= 0.0);
    CHECK(r.margin == doctest::Approx(r.rhs + 3.0 * r.mc_stderr + r.grid_error - r.lhs).epsilon(1e-12));
    CHECK(r.violated == (r.lhs > r.rhs + 3.0 * r.mc_stderr + r.grid_error));
    // The bound has macroscopic slack here: rhs = 15 * W >> any landscape gap.
    CHECK(!r.violated);

    // Same seed reproduces bitwise; a different seed gives different noise.
    const StabilityReport again = verify_stability_wasserstein(mu, nu, 15, 1.0, 30, 7, pipeline);
    CHECK(again.lhs == r.lhs);
    const StabilityReport other = verify_stability_wasserstein(mu, nu, 15, 1.0, 30, 8, pipeline);
    CHECK(other.lhs != r.lhs);
}
