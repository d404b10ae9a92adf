#include "tda/robust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tda/common.hpp"
#include "tda/kernels.hpp"
#include "tda/landscape.hpp"
#include "tda/persistence.hpp"
#include "tda/rips.hpp"
#include "tda/rng.hpp"

namespace tda {
namespace {

// Distances from point i to every point of the cloud (including itself).
void distance_row(const PointCloud& cloud, std::size_t i, std::vector<double>& query, std::vector<double>& out) {
    const std::size_t n = cloud.size();
    out.resize(n);
    if (cloud.metric() == PointCloud::Metric::euclidean) {
        const std::size_t dim = cloud.dim();
        query.resize(dim);
        for (std::size_t d = 0; d < dim; ++d) query[d] = cloud.soa()[d * n + i];
        kernels::active().sq_dist_batch(query.data(), cloud.soa(), n, dim, out.data());
        for (double& v : out) v = std::sqrt(v);
    } else {
        for (std::size_t j = 0; j < n; ++j) out[j] = cloud.dist(i, j);
    }
}

double kernel_value(KernelType kernel, double u) {
    if (kernel == KernelType::gaussian) return std::exp(-0.5 * u * u);
    return u < 1.0 ? 1.0 - u * u : 0.0;  // epanechnikov profile
}

// Integral of the kernel profile over R^D (for density normalization).
double kernel_integral(KernelType kernel, double dim) {
    if (kernel == KernelType::gaussian) return std::pow(2.0 * 3.14159265358979323846, dim / 2.0);
    const double unit_ball = std::pow(3.14159265358979323846, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
    return unit_ball * 2.0 / (dim + 2.0);
}

}  // namespace

KernelType kernel_type_from_name(const std::string& name) {
    if (name == "gaussian") return KernelType::gaussian;
    if (name == "epanechnikov") return KernelType::epanechnikov;
    fail("validation", "unknown kernel '" + name + "' (expected gaussian or epanechnikov)");
}

std::vector<double> kde_scores(const PointCloud& cloud, const KdeParams& params) {
    require(std::isfinite(params.bandwidth) && params.bandwidth > 0.0, "validation",
            "bandwidth must be positive");
    const std::size_t n = cloud.size();
    double norm = 1.0 / static_cast<double>(n);
    if (params.normalized) {
        require(cloud.metric() == PointCloud::Metric::euclidean, "validation",
                "normalized density requires euclidean coordinates");
        const auto dim = static_cast<double>(cloud.dim());
        norm /= std::pow(params.bandwidth, dim) * kernel_integral(params.kernel, dim);
    }
    std::vector<double> scores(n), query, row;
    for (std::size_t i = 0; i < n; ++i) {
        distance_row(cloud, i, query, row);
        double sum = 0.0;
        for (double d : row) sum += kernel_value(params.kernel, d / params.bandwidth);
        scores[i] = sum * norm;
    }
    return scores;
}

std::vector<double> knn_scores(const PointCloud& cloud, std::size_t k) {
    const std::size_t n = cloud.size();
    require(k >= 1 && k < n, "validation",
            "k must lie in [1, N-1], got k=" + std::to_string(k) + " for N=" + std::to_string(n));
    std::vector<double> scores(n), query, row;
    for (std::size_t i = 0; i < n; ++i) {
        distance_row(cloud, i, query, row);
        // Self-distance 0 is the minimum, so the k-th nearest other point is
        // the k-th order statistic of the full row (0-based).
        std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), row.end());
        const double d = row[k];
        scores[i] = d == 0.0 ? 0.0 : -d;
    }
    return scores;
}

FilterResult filtered_cloud(const PointCloud& cloud, const std::vector<double>& scores, double threshold) {
    require(scores.size() == cloud.size(), "validation",
            std::to_string(scores.size()) + " scores for " + std::to_string(cloud.size()) + " points");
    FilterResult result;
    result.threshold = threshold;
    const auto [mn, mx] = std::minmax_element(scores.begin(), scores.end());
    result.min_score = *mn;
    result.max_score = *mx;
    for (std::size_t i = 0; i < scores.size(); ++i)
        if (scores[i] > threshold) result.kept.push_back(static_cast<std::uint32_t>(i));
    require(!result.kept.empty(), "filter-too-aggressive",
            "threshold " + format_double(threshold) + " removes every point (score range [" +
                format_double(result.min_score) + ", " + format_double(result.max_score) + "])");
    result.cloud = cloud.gather(result.kept);
    return result;
}

OutlierReport outlier_experiment(const OutlierParams& params) {
    require(params.n_points >= 4, "validation", "need at least 4 points");
    require(params.m >= 2 && params.n >= 2, "validation", "need m >= 2 and n >= 2");
    require(params.threshold > 0.0 && params.guard_margin > 0.0, "validation",
            "threshold and guard margin must be positive");
    require(params.t_max > params.threshold, "validation", "t_max must exceed the Rips threshold");
    require(params.grid >= 2, "validation", "grid must have at least 2 columns");

    const std::size_t N = params.n_points;
    SyntheticShape circle;
    circle.kind = SyntheticShape::Kind::circle;
    circle.radius = 1.0;
    const PointCloud x_cloud = sample_shape(circle, N, params.seed);

    std::vector<double> rows(N * 2);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t d = 0; d < 2; ++d) rows[i * 2 + d] = x_cloud.soa()[d * N + i];
    std::vector<double> y_rows = rows;
    y_rows[0] = 0.0;  // plant the center in place of the first circle point
    y_rows[1] = 0.0;
    const std::vector<double> clean_rows(rows.begin() + 2, rows.end());
    const PointCloud y_cloud = PointCloud::from_points(y_rows, N, 2);
    const PointCloud clean_cloud = PointCloud::from_points(clean_rows, N - 1, 2);

    // Full runs on circle-only clouds truncate at a fixed threshold for
    // speed; the guard below confirms every dim-1 class died before it.
    PipelineParams full_circle;
    full_circle.rips.max_dim = 1;
    full_circle.rips.policy = RipsParams::ThresholdPolicy::fixed;
    full_circle.rips.threshold_value = params.threshold;
    full_circle.landscape_dim = 1;
    full_circle.depth = 1;
    full_circle.grid = params.grid;
    full_circle.t_max = params.t_max;
    full_circle.threads = params.threads;
    // The planted center encloses Y at radius 1, so the exact default is cheap.
    PipelineParams full_y = full_circle;
    full_y.rips.policy = RipsParams::ThresholdPolicy::enclosing;
    PipelineParams sub = full_y;

    OutlierReport report;
    report.seed = params.seed;
    report.cap = static_cast<double>(params.m) / static_cast<double>(N);
    report.grid_error = params.t_max / static_cast<double>(params.grid - 1);

    const PersistenceDiagram x_diagram = cloud_diagram(x_cloud, full_circle, params.t_max);
    const PersistenceDiagram clean_diagram = cloud_diagram(clean_cloud, full_circle, params.t_max);
    double max_death = 0.0;
    for (const PersistenceDiagram* d : {&x_diagram, &clean_diagram})
        for (const DiagramPoint& pt : d->points)
            if (pt.dim == 1) max_death = std::max(max_death, pt.death);
    report.max_dim1_death = max_death;
    report.guard_ok = max_death < params.threshold - params.guard_margin;

    const Landscape full_x_land = build_landscape(x_diagram, 1, 1, params.grid);
    const Landscape clean_land = build_landscape(clean_diagram, 1, 1, params.grid);
    const Landscape full_y_land = cloud_landscape(y_cloud, full_y, params.t_max);
    report.gap_full = linf_distance(full_x_land, full_y_land);
    report.full_to_clean = linf_distance(full_y_land, clean_land);

    // Average arms with per-cell sums and sums of squares for the MC error.
    SubsampleScheme scheme_x{params.m, params.n, Rng::stream(params.seed, 101).next_u64(), true};
    SubsampleScheme scheme_y{params.m, params.n, Rng::stream(params.seed, 102).next_u64(), true};
    auto arm_values = [&](const PointCloud& cloud, const SubsampleScheme& scheme) {
        const auto subsets = sample_iid(cloud, scheme);
        std::vector<std::vector<double>> values(subsets.size());
        parallel_for(subsets.size(), params.threads, [&](std::size_t i) {
            values[i] = subsample_landscape(cloud, subsets[i], sub, params.t_max).values;
        });
        return values;
    };
    const auto x_values = arm_values(x_cloud, scheme_x);
    const auto y_values = arm_values(y_cloud, scheme_y);

    const std::size_t cells = params.grid;
    std::vector<double> sum_x(cells, 0.0), ss_x(cells, 0.0), sum_y(cells, 0.0), ss_y(cells, 0.0);
    for (std::size_t i = 0; i < params.n; ++i) {
        for (std::size_t c = 0; c < cells; ++c) {
            sum_x[c] += x_values[i][c];
            ss_x[c] += x_values[i][c] * x_values[i][c];
            sum_y[c] += y_values[i][c];
            ss_y[c] += y_values[i][c] * y_values[i][c];
        }
    }
    const auto n = static_cast<double>(params.n);
    double gap = -1.0;
    std::size_t argmax = 0;
    for (std::size_t c = 0; c < cells; ++c) {
        const double diff = std::abs(sum_x[c] - sum_y[c]) / n;
        if (diff > gap) {
            gap = diff;
            argmax = c;
        }
    }
    auto var_at = [n](const std::vector<double>& sum, const std::vector<double>& ss, std::size_t c) {
        const double v = (ss[c] - sum[c] * sum[c] / n) / (n - 1.0);
        return v > 0.0 ? v : 0.0;
    };
    report.gap_avg = gap;
    report.avg_stderr = std::sqrt(var_at(sum_x, ss_x, argmax) / n + var_at(sum_y, ss_y, argmax) / n);
    report.violated = report.gap_avg > report.cap + 3.0 * report.avg_stderr + report.grid_error;

    Landscape avg_y{params.t_max, 1, params.grid, std::vector<double>(cells, 0.0)};
    for (std::size_t c = 0; c < cells; ++c) avg_y.values[c] = sum_y[c] / n;
    report.avg_to_clean = linf_distance(avg_y, clean_land);

    // Closest-sample arms share the subsample schemes with the average arms.
    const EstimatorReport closest_x = closest_sample_landscape(x_cloud, scheme_x, sub);
    const EstimatorReport closest_y = closest_sample_landscape(y_cloud, scheme_y, sub);
    report.gap_closest = linf_distance(closest_x.estimate, closest_y.estimate);
    report.closest_to_clean = linf_distance(closest_y.estimate, clean_land);
    report.avg_beats_closest = report.avg_to_clean < report.closest_to_clean;
    const auto y_subsets = sample_iid(y_cloud, scheme_y);
    const auto& chosen = y_subsets[closest_y.selected_index];
    report.closest_infected = std::find(chosen.begin(), chosen.end(), 0u) != chosen.end();
    return report;
}

}  // namespace tda
