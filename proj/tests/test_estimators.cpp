#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "tda/estimators.hpp"
#include "tda/rng.hpp"
#include "test_util.hpp"

using namespace tda;

namespace {

PointCloud circle_cloud(std::size_t n, std::uint64_t seed) {
    SyntheticShape s;  // unit circle
    return sample_shape(s, n, seed);
}

PipelineParams small_pipeline() {
    PipelineParams p;
    p.rips.max_dim = 1;
    p.grid = 128;
    p.depth = 2;
    return p;
}

}  // namespace

TEST_CASE("resolve_t_max") {
    const PointCloud c = circle_cloud(20, 1);
    PipelineParams params;
    params.t_max = 3.5;
    CHECK(resolve_t_max(c, params) == 3.5);
    params.t_max = 0.0;
    CHECK(resolve_t_max(c, params) == 2.0 * c.diameter());
    const PointCloud degenerate = PointCloud::from_points({1.0, 1.0}, 1, 2);
    CHECK_TDA_ERROR(resolve_t_max(degenerate, params), "validation");
}

TEST_CASE("cloud_landscape is the composed pipeline") {
    const PointCloud c = circle_cloud(25, 2);
    const PipelineParams params = small_pipeline();
    const double t_max = resolve_t_max(c, params);
    const Landscape got = cloud_landscape(c, params, t_max);
    const Landscape want =
        build_landscape(compute_diagram(build_rips(c, params.rips), t_max), params.landscape_dim,
                        params.depth, params.grid);
    CHECK(got.values == want.values);
    CHECK(got.t_max == want.t_max);
}

TEST_CASE("full-size subsamples reproduce the full landscape exactly") {
    const PointCloud c = circle_cloud(30, 3);
    const PipelineParams params = small_pipeline();
    SubsampleScheme scheme;
    scheme.m = c.size();
    scheme.n = 2;  // two permutations of the full set; (x + x) / 2 is exact
    scheme.replacement = false;
    scheme.seed = 17;

    const double t_max = resolve_t_max(c, params);
    const Landscape full = cloud_landscape(c, params, t_max);

    const EstimatorReport avg = average_landscape(c, scheme, params);
    CHECK(avg.estimate.values == full.values);
    REQUIRE(avg.diagnostics.size() == 2);
    CHECK(avg.diagnostics[0].diagram_size > 0);

    const EstimatorReport closest = closest_sample_landscape(c, scheme, params);
    CHECK(closest.estimate.values == full.values);
    CHECK(closest.selected_index == 0);  // both at Hausdorff 0; tie keeps index 0
    REQUIRE(closest.diagnostics.size() == 2);
    CHECK(*closest.diagnostics[0].hausdorff_to_reference == 0.0);
    CHECK(*closest.diagnostics[1].hausdorff_to_reference == 0.0);
}

TEST_CASE("average equals the mean of per-subsample landscapes") {
    const PointCloud c = circle_cloud(40, 4);
    const PipelineParams params = small_pipeline();
    SubsampleScheme scheme;
    scheme.m = 12;
    scheme.n = 4;
    scheme.seed = 23;

    const double t_max = resolve_t_max(c, params);
    const EstimatorReport report = average_landscape(c, scheme, params);

    const auto subsets = sample_iid(c, scheme);
    std::vector<Landscape> each;
    for (const auto& idx : subsets) each.push_back(subsample_landscape(c, idx, params, t_max));
    const Landscape want = average(each);
    CHECK(report.estimate.values == want.values);

    // Threads do not change the result: accumulation happens in index order.
    PipelineParams threaded = params;
    threaded.threads = 4;
    const EstimatorReport parallel_report = average_landscape(c, scheme, threaded);
    CHECK(parallel_report.estimate.values == report.estimate.values);
}

TEST_CASE("closest-sample picks the Hausdorff argmin and reports it") {
    const PointCloud c = circle_cloud(50, 5);
    const PipelineParams params = small_pipeline();
    SubsampleScheme scheme;
    scheme.m = 10;
    scheme.n = 6;
    scheme.seed = 31;

    const double t_max = resolve_t_max(c, params);
    const EstimatorReport report = closest_sample_landscape(c, scheme, params);
    REQUIRE(report.selected_index < scheme.n);

    const auto subsets = sample_iid(c, scheme);
    std::vector<std::uint32_t> all(c.size());
    std::iota(all.begin(), all.end(), 0u);
    std::size_t best = 0;
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        const double h = hausdorff_subsets(c, all, subsets[i]);
        CHECK(h == *report.diagnostics[i].hausdorff_to_reference);
        if (h < hausdorff_subsets(c, all, subsets[best])) best = i;
    }
    CHECK(report.selected_index == best);
    const Landscape want = subsample_landscape(c, subsets[best], params, t_max);
    CHECK(report.estimate.values == want.values);
}

TEST_CASE("estimator validation errors") {
    const PointCloud c = circle_cloud(20, 6);
    const PipelineParams params = small_pipeline();
    SubsampleScheme scheme;
    scheme.m = 0;
    CHECK_TDA_ERROR(average_landscape(c, scheme, params), "validation");
    scheme.m = 25;
    scheme.replacement = false;  // m > N
    CHECK_TDA_ERROR(closest_sample_landscape(c, scheme, params), "validation");
}

TEST_CASE("bootstrap band on two landscapes takes one of two values") {
    const PointCloud c = circle_cloud(30, 7);
    const PipelineParams params = small_pipeline();
    const double t_max = resolve_t_max(c, params);
    const Landscape l0 = subsample_landscape(c, sample_one(c.size(), 12, true, 5, 0), params, t_max);
    const Landscape l1 = subsample_landscape(c, sample_one(c.size(), 12, true, 5, 1), params, t_max);
    REQUIRE(linf_distance(l0, l1) > 0.0);

    const std::vector<Landscape> pair = {l0, l1};
    const ConfidenceBand band = bootstrap_band(pair, 0.05, 200, 99);
    const Landscape center = average(pair);
    CHECK(band.center.values == center.values);
    CHECK(band.alpha == 0.05);
    CHECK(band.resamples == 200);
    // Resample means are l0, l1, or the center; deviations are d/2, d/2, or 0.
    // At B=200 and alpha=0.05 the selected quantile is d/2 (rank 190 of 200).
    const double d = linf_distance(l0, l1);
    CHECK(band.half_width == doctest::Approx(d / 2.0).epsilon(1e-14));

    // Deterministic per seed.
    const ConfidenceBand again = bootstrap_band(pair, 0.05, 200, 99);
    CHECK(again.half_width == band.half_width);
    // Wider confidence (smaller alpha) can never shrink the band.
    const ConfidenceBand narrow = bootstrap_band(pair, 0.5, 200, 99);
    CHECK(narrow.half_width <= band.half_width);

    CHECK_TDA_ERROR(bootstrap_band(std::vector<Landscape>{l0}, 0.05, 10, 1), "insufficient-samples");
    CHECK_TDA_ERROR(bootstrap_band(pair, 0.05, 0, 1), "validation");
    CHECK_TDA_ERROR(bootstrap_band(pair, 1.5, 10, 1), "validation");
}

TEST_CASE("subsampled bootstrap band is reproducible and centered on the mean") {
    const PointCloud c = circle_cloud(40, 8);
    const PipelineParams params = small_pipeline();
    SubsampleScheme scheme;
    scheme.m = 12;
    scheme.n = 5;
    scheme.seed = 41;
    const ConfidenceBand band = bootstrap_band_subsampled(c, scheme, params, 0.1, 50, 77);
    const EstimatorReport avg = average_landscape(c, scheme, params);
    CHECK(band.center.values == avg.estimate.values);
    CHECK(band.half_width >= 0.0);
    const ConfidenceBand again = bootstrap_band_subsampled(c, scheme, params, 0.1, 50, 77);
    CHECK(again.half_width == band.half_width);
}

TEST_CASE("dissimilarity matrix is symmetric with recomputable entries") {
    const std::vector<PointCloud> clouds = {circle_cloud(30, 9), circle_cloud(30, 10),
                                            sample_shape(SyntheticShape{SyntheticShape::Kind::uniform_cube}, 30, 11)};
    const std::vector<std::string> labels = {"c1", "c2", "cube"};
    PipelineParams params = small_pipeline();
    SubsampleScheme scheme;
    scheme.m = 10;
    scheme.n = 3;
    scheme.seed = 51;

    const DissimilarityResult result = dissimilarity_matrix(clouds, labels, scheme, params);
    CHECK(result.labels == labels);
    REQUIRE(result.matrix.size() == 9);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(result.matrix[i * 3 + i] == 0.0);
        for (std::size_t j = 0; j < 3; ++j) CHECK(result.matrix[i * 3 + j] == result.matrix[j * 3 + i]);
    }

    // Entries are the sup-norm gaps between per-cloud averages on the shared grid.
    double shared_t = 0.0;
    for (const auto& cl : clouds) shared_t = std::max(shared_t, 2.0 * cl.diameter());
    PipelineParams pinned = params;
    pinned.t_max = shared_t;
    const Landscape a0 = average_landscape(clouds[0], scheme, pinned).estimate;
    const Landscape a1 = average_landscape(clouds[1], scheme, pinned).estimate;
    CHECK(result.matrix[1] == linf_distance(a0, a1));

    // Same-shape clouds sit closer than circle-vs-cube.
    CHECK(result.matrix[0 * 3 + 1] < result.matrix[0 * 3 + 2]);

    CHECK_TDA_ERROR(dissimilarity_matrix({}, {}, scheme, params), "empty-set");
    CHECK_TDA_ERROR(dissimilarity_matrix(clouds, {"a"}, scheme, params), "validation");
}

TEST_CASE("dissimilarity CSV format") {
    DissimilarityResult r;
    r.labels = {"a", "b"};
    r.matrix = {0.0, 0.5, 0.5, 0.0};
    const std::string path = "test_dissimilarity.csv";
    write_dissimilarity_csv(path, r);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == "label,a,b\na,0,0.5\nb,0.5,0\n");
    std::remove(path.c_str());
}

TEST_CASE("expected-Hausdorff estimate matches its own draws") {
    const PointCloud c = circle_cloud(40, 12);
    const HausdorffEstimate est = estimate_expected_hausdorff(c, 10, 6, 13);
    REQUIRE(est.draws.size() == 6);
    double sum = 0.0;
    for (double d : est.draws) {
        CHECK(d >= 0.0);
        sum += d;
    }
    CHECK(est.mean == doctest::Approx(sum / 6.0).epsilon(1e-14));
    REQUIRE(est.standard_error.has_value());
    double sq = 0.0;
    for (double d : est.draws) sq += (d - est.mean) * (d - est.mean);
    const double want_se = std::sqrt(sq / (6.0 * 5.0));
    CHECK(*est.standard_error == doctest::Approx(want_se).epsilon(1e-12));

    // Single draw: no spread estimate; the draw is reproducible from its stream.
    const HausdorffEstimate one = estimate_expected_hausdorff(c, 10, 1, 13);
    CHECK(!one.standard_error.has_value());
    CHECK(one.draws[0] == est.draws[0]);
}

TEST_CASE("closed-form bound evaluators match their formulas on both branches") {
    const double a = 0.8, b = 2.0, c1 = 1.7, c2 = 2.3;
    const std::size_t m = 100, n = 5;
    const double rm = bound_rm(a, b, m);
    CHECK(rm == doctest::Approx(2.0 * std::pow(std::log(100.0) / (a * 100.0), 1.0 / b)).epsilon(1e-12));
    CHECK_TDA_ERROR(bound_rm(a, b, 1), "m-too-small");

    StandardAssumption tight;  // r0 = 0 < rm
    tight.a = a;
    tight.b = b;
    const double logm2 = std::log(100.0) * std::log(100.0);
    CHECK(bound_average_bias(tight, m, c1) == doctest::Approx(rm + c1 * rm / logm2).epsilon(1e-12));

    StandardAssumption loose = tight;  // r0 dominates rm
    loose.r0 = 10.0;
    CHECK(bound_average_bias(loose, m, c1) == doctest::Approx(10.0 + c1 * rm / logm2).epsilon(1e-12));

    const double lg = b * std::log(2.0) + std::log(static_cast<double>(m));
    const double rmp = 2.0 * std::pow(lg / (a * m), 1.0 / b);
    const double tail = c2 * rmp / (static_cast<double>(n) * std::pow(lg, static_cast<double>(n) + 1.0));
    CHECK(bound_closest(tight, m, n, c2) == doctest::Approx(rmp + tail).epsilon(1e-12));
    CHECK(bound_closest(loose, m, n, c2) == doctest::Approx(10.0 + tail).epsilon(1e-12));

    const double h = 0.05;
    CHECK(bound_stability_hausdorff(tight, m, h, c1) ==
          doctest::Approx(h + 2.0 * rm + 2.0 * c1 * rm / logm2).epsilon(1e-12));
    CHECK(bound_stability_hausdorff(loose, m, h, c1) ==
          doctest::Approx(h + 2.0 * 10.0 + 2.0 * c1 * rm / logm2).epsilon(1e-12));

    CHECK(compute_r0_discrete(1.5, 2.0, 0.5, 2.0, 1000) ==
          doctest::Approx(std::pow(1.5 * 2.0 / 0.5 * std::log(1000.0) / 1000.0, 0.5)).epsilon(1e-12));
    CHECK_TDA_ERROR(compute_r0_discrete(1.5, 2.0, 0.5, 2.0, 1), "validation");
}

TEST_CASE("risk curves have the requested shape and flag monotonicity") {
    const PointCloud c = circle_cloud(60, 14);
    PipelineParams params = small_pipeline();
    RiskCurveParams rc;
    rc.m_values = {5, 15, 45};
    rc.n_values = {2, 4};
    rc.m_fixed = 10;
    rc.bias_draws = 8;
    rc.replications = 2;
    rc.reference_n = 16;
    rc.seed = 3;

    const RiskCurves curves = risk_curves(c, rc, params);
    CHECK(curves.m_values == rc.m_values);
    CHECK(curves.n_values == rc.n_values);
    REQUIRE(curves.bias.size() == 3);
    REQUIRE(curves.variance.size() == 2);
    for (double v : curves.bias) CHECK(v >= 0.0);
    for (double v : curves.variance) CHECK(v >= 0.0);

    const bool bias_down = curves.bias[0] > curves.bias[1] && curves.bias[1] > curves.bias[2];
    CHECK(curves.bias_monotone == bias_down);
    const bool var_down = curves.variance[0] > curves.variance[1];
    CHECK(curves.variance_monotone == var_down);

    // Larger subsamples sit closer to the cloud in expected Hausdorff distance.
    CHECK(curves.bias[0] > curves.bias[2]);
}
