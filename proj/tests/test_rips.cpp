#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tda/persistence.hpp"
#include "tda/rips.hpp"
#include "tda/rng.hpp"
#include "test_util.hpp"

using namespace tda;

namespace {

PointCloud random_cloud(std::size_t n, std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> pts(n * dim);
    for (auto& x : pts) x = rng.next_gaussian();
    return PointCloud::from_points(pts, n, dim);
}

PointCloud unit_square() {
    return PointCloud::from_points({0, 0, 1, 0, 1, 1, 0, 1}, 4, 2);
}

// (value, ascending vertex tuple) list of one filtration dimension.
std::vector<std::pair<double, std::vector<std::uint32_t>>> dim_entries(const Filtration& f, int d) {
    std::vector<std::pair<double, std::vector<std::uint32_t>>> out;
    for (std::size_t i = 0; i < f.count(d); ++i) {
        const auto verts = f.vertices(d, i);
        out.emplace_back(f.value(d, i), std::vector<std::uint32_t>(verts.begin(), verts.begin() + d + 1));
    }
    return out;
}

}  // namespace

TEST_CASE("unit square at the diagonal threshold is the full 2-skeleton") {
    const PointCloud sq = unit_square();
    const double diag = sq.diameter();
    const Filtration f = build_rips(sq, 1, diag);
    CHECK(f.vertex_count() == 4);
    CHECK(f.max_homology_dim() == 1);
    CHECK(f.max_simplex_dim() == 2);
    CHECK(f.count(0) == 4);
    CHECK(f.count(1) == 6);
    CHECK(f.count(2) == 4);
    // All vertices enter at 0; side edges at 1; diagonals and all triangles at sqrt(2).
    for (std::size_t i = 0; i < 4; ++i) CHECK(f.value(0, i) == 0.0);
    CHECK(f.value(1, 0) == 1.0);
    CHECK(f.value(1, 3) == 1.0);
    CHECK(f.value(1, 4) == diag);
    for (std::size_t i = 0; i < 4; ++i) CHECK(f.value(2, i) == diag);
    // Below the diagonal the square is just its 4 sides.
    const Filtration open_square = build_rips(sq, 1, 1.0);
    CHECK(open_square.count(1) == 4);
    CHECK(open_square.count(2) == 0);
}

TEST_CASE("count_simplices matches the stored filtration sizes") {
    const PointCloud c = random_cloud(40, 2, 21);
    const double threshold = 0.8 * c.enclosing_radius();
    const Filtration f = build_rips(c, 1, threshold);
    const auto counts = count_simplices(c, 2, threshold);
    REQUIRE(counts.size() == 3);
    CHECK(counts[0] == f.count(0));
    CHECK(counts[1] == f.count(1));
    CHECK(counts[2] == f.count(2));
    // The budget estimate dominates the exact counts.
    const auto est = estimate_simplex_counts(c, 2, threshold);
    for (std::size_t d = 0; d < 3; ++d) CHECK(est[d] >= static_cast<double>(counts[d]));
}

TEST_CASE("filtration equals brute-force subset enumeration") {
    SUBCASE("50 points, homology dim 1") {
        const PointCloud c = random_cloud(50, 3, 33);
        const double threshold = 0.6 * c.enclosing_radius();
        const Filtration f = build_rips(c, 1, threshold);
        const auto oracle = oracles::oracle_simplices(c, 2, threshold);
        for (int d = 0; d <= 2; ++d) {
            const auto got = dim_entries(f, d);
            REQUIRE(got.size() == oracle[static_cast<std::size_t>(d)].size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].first == oracle[static_cast<std::size_t>(d)][i].value);
                CHECK(got[i].second == oracle[static_cast<std::size_t>(d)][i].verts);
            }
        }
    }
    SUBCASE("12 points, homology dim 2") {
        const PointCloud c = random_cloud(12, 3, 34);
        const double threshold = c.diameter();
        const Filtration f = build_rips(c, 2, threshold);
        const auto oracle = oracles::oracle_simplices(c, 3, threshold);
        for (int d = 0; d <= 3; ++d) {
            const auto got = dim_entries(f, d);
            REQUIRE(got.size() == oracle[static_cast<std::size_t>(d)].size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].first == oracle[static_cast<std::size_t>(d)][i].value);
                CHECK(got[i].second == oracle[static_cast<std::size_t>(d)][i].verts);
            }
        }
    }
}

TEST_CASE("per-dimension entries are sorted by (value, lex)") {
    const PointCloud c = random_cloud(30, 2, 55);
    const Filtration f = build_rips(c, 1, 0.7 * c.enclosing_radius());
    for (int d = 0; d <= f.max_simplex_dim(); ++d) {
        const auto entries = dim_entries(f, d);
        for (std::size_t i = 1; i < entries.size(); ++i) {
            const bool ordered = entries[i - 1].first < entries[i].first ||
                                 (entries[i - 1].first == entries[i].first &&
                                  entries[i - 1].second < entries[i].second);
            CHECK(ordered);
        }
    }
}

TEST_CASE("threshold policies") {
    const PointCloud c = random_cloud(25, 2, 66);
    RipsParams params;
    params.policy = RipsParams::ThresholdPolicy::enclosing;
    CHECK(resolve_threshold(c, params) == c.enclosing_radius());
    params.policy = RipsParams::ThresholdPolicy::diameter;
    CHECK(resolve_threshold(c, params) == c.diameter());
    params.policy = RipsParams::ThresholdPolicy::fixed;
    params.threshold_value = 0.25;
    CHECK(resolve_threshold(c, params) == 0.25);
    params.threshold_value = -1.0;
    CHECK_TDA_ERROR(resolve_threshold(c, params), "validation");
}

TEST_CASE("enclosing-radius threshold yields the same diagram as the diameter threshold") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const PointCloud c = random_cloud(30, 2, 100 + seed);
        REQUIRE(c.enclosing_radius() < c.diameter());  // policies genuinely differ
        const double t_max = 2.0 * c.diameter();
        RipsParams enc;
        enc.policy = RipsParams::ThresholdPolicy::enclosing;
        RipsParams dia;
        dia.policy = RipsParams::ThresholdPolicy::diameter;
        const PersistenceDiagram a = compute_diagram(build_rips(c, enc), t_max);
        const PersistenceDiagram b = compute_diagram(build_rips(c, dia), t_max);
        REQUIRE(a.points.size() == b.points.size());
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            CHECK(a.points[i].dim == b.points[i].dim);
            CHECK(a.points[i].birth == b.points[i].birth);
            CHECK(a.points[i].death == b.points[i].death);
        }
    }
}

TEST_CASE("budget and parameter validation") {
    const PointCloud c = random_cloud(50, 2, 77);
    RipsParams params;
    params.policy = RipsParams::ThresholdPolicy::diameter;
    params.budget = 10;
    CHECK_TDA_ERROR(build_rips(c, params), "complexity-budget");

    RipsParams deep;
    deep.max_dim = 5;  // above the cap
    CHECK_TDA_ERROR(build_rips(c, deep), "validation");
    RipsParams neg;
    neg.max_dim = -1;
    CHECK_TDA_ERROR(build_rips(c, neg), "validation");
    CHECK_TDA_ERROR(build_rips(c, 1, -0.5), "validation");
}

TEST_CASE("dump writes global filtration order") {
    const PointCloud c = random_cloud(10, 2, 88);
    const Filtration f = build_rips(c, 1, c.diameter());
    const std::string path = "test_rips_dump.txt";
    f.dump(path);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    double prev_value = -1.0;
    int prev_dim = -1;
    std::vector<std::uint32_t> prev_verts;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        double value;
        int dim;
        REQUIRE((ss >> value >> dim));
        std::vector<std::uint32_t> verts(static_cast<std::size_t>(dim) + 1);
        for (auto& v : verts) REQUIRE((ss >> v));
        // (value, dim, lex) nondecreasing.
        const bool ordered = value > prev_value ||
                             (value == prev_value && dim > prev_dim) ||
                             (value == prev_value && dim == prev_dim && verts > prev_verts);
        CHECK(ordered);
        prev_value = value;
        prev_dim = dim;
        prev_verts = verts;
        ++lines;
    }
    CHECK(lines == f.count(0) + f.count(1) + f.count(2));
    std::remove(path.c_str());
}

TEST_CASE("simplex key packing round-trips") {
    Rng rng(99);
    for (int dim = 0; dim <= 3; ++dim) {
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<std::uint32_t> verts;
            std::uint32_t v = 0;
            for (int i = 0; i <= dim; ++i) {
                v += 1 + static_cast<std::uint32_t>(rng.next_below(500));
                verts.push_back(v);
            }
            const std::uint64_t key = pack_simplex(verts.data(), dim);
            std::array<std::uint32_t, 5> out{};
            unpack_simplex(key, dim, out.data());
            for (int i = 0; i <= dim; ++i) CHECK(out[static_cast<std::size_t>(i)] == verts[static_cast<std::size_t>(i)]);
        }
    }
    // lex_less agrees with tuple comparison.
    const std::uint32_t a[] = {0, 2, 5};
    const std::uint32_t b[] = {0, 3, 4};
    CHECK(lex_less(pack_simplex(a, 2), pack_simplex(b, 2), 2));
    CHECK(!lex_less(pack_simplex(b, 2), pack_simplex(a, 2), 2));
}
