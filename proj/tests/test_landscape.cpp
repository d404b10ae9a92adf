#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "tda/landscape.hpp"
#include "tda/rng.hpp"
#include "test_util.hpp"

using namespace tda;

namespace {

PersistenceDiagram make_diagram(double t_max, std::vector<DiagramPoint> points) {
    std::sort(points.begin(), points.end(), [](const DiagramPoint& a, const DiagramPoint& b) {
        if (a.dim != b.dim) return a.dim < b.dim;
        if (a.birth != b.birth) return a.birth < b.birth;
        return a.death < b.death;
    });
    PersistenceDiagram d;
    d.t_max = t_max;
    d.points = std::move(points);
    return d;
}

PersistenceDiagram random_diagram(double t_max, std::size_t n, Rng& rng) {
    std::vector<DiagramPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double birth = rng.next_double() * t_max * 0.9;
        const double death = birth + rng.next_double() * (t_max - birth);
        if (death > birth) pts.push_back({1, birth, death});
    }
    return make_diagram(t_max, std::move(pts));
}

}  // namespace

TEST_CASE("tent function hand values") {
    CHECK(tent(0.0, 2.0, 1.0) == 1.0);
    CHECK(tent(1.0, 3.0, 1.5) == 0.5);
    CHECK(tent(1.0, 3.0, 2.5) == 0.5);
    CHECK(tent(1.0, 3.0, 0.5) == 0.0);
    CHECK(tent(1.0, 3.0, 3.5) == 0.0);
    CHECK(tent(1.0, 3.0, 1.0) == 0.0);
}

TEST_CASE("single-point landscape is one exact tent") {
    const PersistenceDiagram d = make_diagram(2.0, {{1, 0.0, 2.0}});
    const Landscape l = build_landscape(d, 1, 2, 5);
    CHECK(l.t_max == 2.0);
    CHECK(l.depth == 2);
    CHECK(l.grid == 5);
    CHECK(l.dt() == 0.5);
    const std::vector<double> layer1 = {0.0, 0.5, 1.0, 0.5, 0.0};
    for (std::size_t g = 0; g < 5; ++g) {
        CHECK(l.at(0, g) == layer1[g]);
        CHECK(l.at(1, g) == 0.0);  // only one tent: second layer vanishes
    }
    CHECK(l.sup() == 1.0);
}

TEST_CASE("nested pair fills two layers") {
    // Outer (0,2) and inner (0.5,1.5): at t=1 the layers are 1 and 0.5.
    const PersistenceDiagram d = make_diagram(2.0, {{1, 0.0, 2.0}, {1, 0.5, 1.5}});
    const Landscape l = build_landscape(d, 1, 3, 5);
    CHECK(l.at(0, 2) == 1.0);
    CHECK(l.at(1, 2) == 0.5);
    CHECK(l.at(2, 2) == 0.0);
}

TEST_CASE("grid values equal the k-th largest tent oracle exactly") {
    Rng rng(888);
    for (int trial = 0; trial < 15; ++trial) {
        const double t_max = 1.0 + rng.next_double();
        const PersistenceDiagram d = random_diagram(t_max, 2 + static_cast<std::size_t>(rng.next_below(6)), rng);
        const std::size_t depth = 4, grid = 33;
        const Landscape l = build_landscape(d, 1, depth, grid);
        for (std::size_t k = 0; k < depth; ++k) {
            for (std::size_t g = 0; g < grid; ++g) {
                const double t = static_cast<double>(g) * l.dt();
                CHECK(l.at(k, g) == oracles::oracle_landscape_value(d, 1, k + 1, t));
            }
        }
    }
}

TEST_CASE("landscape axioms hold exactly on the grid") {
    Rng rng(999);
    for (int trial = 0; trial < 10; ++trial) {
        const PersistenceDiagram d = random_diagram(2.0, 6, rng);
        const Landscape l = build_landscape(d, 1, 3, 64);
        for (std::size_t g = 0; g < l.grid; ++g) {
            CHECK(l.at(0, g) >= l.at(1, g));  // layers are nonincreasing in k
            CHECK(l.at(1, g) >= l.at(2, g));
            CHECK(l.at(2, g) >= 0.0);
        }
        // Discrete 1-Lipschitz bound: adjacent grid values differ by at most dt.
        for (std::size_t k = 0; k < l.depth; ++k)
            for (std::size_t g = 1; g < l.grid; ++g)
                CHECK(std::abs(l.at(k, g) - l.at(k, g - 1)) <= l.dt() * (1.0 + 1e-12));
    }
}

TEST_CASE("landscape ignores other homology dimensions") {
    const PersistenceDiagram d = make_diagram(2.0, {{0, 0.0, 2.0}, {1, 0.5, 1.5}});
    const Landscape l = build_landscape(d, 1, 1, 5);
    CHECK(l.at(0, 2) == 0.5);  // only the dim-1 point contributes
    const Landscape l0 = build_landscape(d, 0, 1, 5);
    CHECK(l0.at(0, 2) == 1.0);
}

TEST_CASE("sup-norm distance and grid compatibility") {
    const PersistenceDiagram a = make_diagram(2.0, {{1, 0.0, 2.0}});
    const PersistenceDiagram b = make_diagram(2.0, {{1, 0.0, 1.0}});
    const Landscape la = build_landscape(a, 1, 2, 9);
    const Landscape lb = build_landscape(b, 1, 2, 9);
    CHECK(linf_distance(la, la) == 0.0);
    // At the grid point t=1: tent(0,2) is 1 and tent(0,1) is already 0.
    CHECK(linf_distance(la, lb) == 1.0);
    CHECK(linf_distance(lb, la) == linf_distance(la, lb));

    const Landscape wrong_grid = build_landscape(b, 1, 2, 17);
    CHECK_TDA_ERROR(linf_distance(la, wrong_grid), "grid-mismatch");
    const Landscape wrong_depth = build_landscape(b, 1, 3, 9);
    CHECK_TDA_ERROR(linf_distance(la, wrong_depth), "grid-mismatch");
}

TEST_CASE("average and accumulate agree and are elementwise exact") {
    Rng rng(555);
    const PersistenceDiagram d1 = random_diagram(2.0, 5, rng);
    const PersistenceDiagram d2 = random_diagram(2.0, 5, rng);
    const PersistenceDiagram d3 = random_diagram(2.0, 5, rng);
    const Landscape l1 = build_landscape(d1, 1, 2, 33);
    const Landscape l2 = build_landscape(d2, 1, 2, 33);
    const Landscape l3 = build_landscape(d3, 1, 2, 33);

    const std::vector<Landscape> all = {l1, l2, l3};
    const Landscape avg = average(all);
    // Same additions in the same order, scaled once.
    for (std::size_t i = 0; i < avg.values.size(); ++i) {
        const double want = (l1.values[i] + l2.values[i] + l3.values[i]) * (1.0 / 3.0);
        CHECK(avg.values[i] == want);
    }

    Landscape acc = l1;
    accumulate(acc, l2);
    accumulate(acc, l3);
    for (std::size_t i = 0; i < acc.values.size(); ++i)
        CHECK(acc.values[i] == l1.values[i] + l2.values[i] + l3.values[i]);

    const Landscape one = average(std::vector<Landscape>{l1});
    CHECK(one.values == l1.values);

    CHECK_TDA_ERROR(average(std::vector<Landscape>{}), "empty-average");
    Landscape mismatched = build_landscape(d2, 1, 2, 65);
    CHECK_TDA_ERROR(accumulate(acc, mismatched), "grid-mismatch");
}

TEST_CASE("landscape CSV round-trips bitwise") {
    Rng rng(777);
    const PersistenceDiagram d = random_diagram(1.7, 6, rng);
    const Landscape l = build_landscape(d, 1, 3, 41);
    const std::string path = "test_landscape_roundtrip.csv";
    write_landscape_csv(path, l);
    const Landscape back = read_landscape_csv(path);
    CHECK(back.t_max == l.t_max);
    CHECK(back.depth == l.depth);
    CHECK(back.grid == l.grid);
    CHECK(back.values == l.values);
    std::remove(path.c_str());
}

TEST_CASE("degenerate grids are rejected") {
    const PersistenceDiagram d = make_diagram(2.0, {{1, 0.0, 2.0}});
    CHECK_TDA_ERROR(build_landscape(d, 1, 0, 8), "validation");
    CHECK_TDA_ERROR(build_landscape(d, 1, 1, 1), "validation");
}
