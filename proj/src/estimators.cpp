#include "tda/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "tda/common.hpp"
#include "tda/persistence.hpp"
#include "tda/rng.hpp"

namespace tda {
namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Strip the "code: " prefix Error::what() carries so rethrown messages do
// not repeat it.
std::string error_message(const Error& e) {
    const std::string what = e.what();
    const std::string prefix = e.code() + ": ";
    return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) {
    return Rng::stream(seed, purpose).next_u64();
}

// Landscapes of all n subsamples, each from its own (seed, i) stream.
std::vector<Landscape> subsample_landscapes(const PointCloud& cloud, const SubsampleScheme& scheme,
                                            const PipelineParams& params, double t_max,
                                            std::vector<SubsampleDiagnostic>* diags) {
    const auto subsets = sample_iid(cloud, scheme);
    std::vector<Landscape> landscapes(subsets.size());
    if (diags) diags->assign(subsets.size(), SubsampleDiagnostic{});
    parallel_for(subsets.size(), params.threads, [&](std::size_t i) {
        try {
            const PointCloud sub = cloud.gather(subsets[i]);
            const PersistenceDiagram diagram = cloud_diagram(sub, params, t_max);
            landscapes[i] = build_landscape(diagram, params.landscape_dim, params.depth, params.grid);
            if (diags) {
                (*diags)[i].index = static_cast<std::uint32_t>(i);
                (*diags)[i].diagram_size = diagram.points.size();
            }
        } catch (const Error& e) {
            throw Error(e.code(), "subsample " + std::to_string(i) + ": " + error_message(e));
        }
    });
    return landscapes;
}

}  // namespace

double resolve_t_max(const PointCloud& reference, const PipelineParams& params) {
    if (params.t_max > 0.0) return params.t_max;
    const double t = 2.0 * reference.diameter();
    require(t > 0.0, "validation", "cannot resolve grid endpoint: reference cloud has zero diameter");
    return t;
}

PersistenceDiagram cloud_diagram(const PointCloud& cloud, const PipelineParams& params, double t_max) {
    return compute_diagram(build_rips(cloud, params.rips), t_max);
}

Landscape cloud_landscape(const PointCloud& cloud, const PipelineParams& params, double t_max) {
    return build_landscape(cloud_diagram(cloud, params, t_max), params.landscape_dim, params.depth, params.grid);
}

Landscape subsample_landscape(const PointCloud& cloud, std::span<const std::uint32_t> indices,
                              const PipelineParams& params, double t_max) {
    return cloud_landscape(cloud.gather(indices), params, t_max);
}

EstimatorReport average_landscape(const PointCloud& cloud, const SubsampleScheme& scheme,
                                  const PipelineParams& params) {
    const auto t0 = std::chrono::steady_clock::now();
    require(scheme.n >= 1, "validation", "need at least one subsample");
    EstimatorReport report;
    report.scheme = scheme;
    const double t_max = resolve_t_max(cloud, params);
    const auto landscapes = subsample_landscapes(cloud, scheme, params, t_max, &report.diagnostics);
    report.estimate = average(landscapes);
    report.wall_seconds = seconds_since(t0);
    return report;
}

EstimatorReport closest_sample_landscape(const PointCloud& cloud, const SubsampleScheme& scheme,
                                         const PipelineParams& params) {
    const auto t0 = std::chrono::steady_clock::now();
    require(scheme.n >= 1, "validation", "need at least one subsample");
    EstimatorReport report;
    report.scheme = scheme;
    const double t_max = resolve_t_max(cloud, params);
    const auto subsets = sample_iid(cloud, scheme);

    std::vector<std::uint32_t> all(cloud.size());
    std::iota(all.begin(), all.end(), 0u);
    report.diagnostics.assign(subsets.size(), SubsampleDiagnostic{});
    parallel_for(subsets.size(), params.threads, [&](std::size_t i) {
        report.diagnostics[i].index = static_cast<std::uint32_t>(i);
        report.diagnostics[i].hausdorff_to_reference = hausdorff_subsets(cloud, all, subsets[i]);
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < subsets.size(); ++i) {
        if (*report.diagnostics[i].hausdorff_to_reference < *report.diagnostics[best].hausdorff_to_reference)
            best = i;  // strict: ties keep the lowest index
    }
    report.selected_index = best;
    try {
        const PersistenceDiagram diagram = cloud_diagram(cloud.gather(subsets[best]), params, t_max);
        report.diagnostics[best].diagram_size = diagram.points.size();
        report.estimate = build_landscape(diagram, params.landscape_dim, params.depth, params.grid);
    } catch (const Error& e) {
        throw Error(e.code(), "subsample " + std::to_string(best) + ": " + error_message(e));
    }
    report.wall_seconds = seconds_since(t0);
    return report;
}

ConfidenceBand bootstrap_band(const std::vector<Landscape>& landscapes, double alpha, std::size_t B,
                              std::uint64_t seed) {
    require(landscapes.size() >= 2, "insufficient-samples",
            "bootstrap needs at least 2 landscapes, got " + std::to_string(landscapes.size()));
    require(alpha > 0.0 && alpha < 1.0, "validation", "alpha must lie in (0, 1)");
    require(B >= 1, "validation", "need at least one bootstrap resample");
    ConfidenceBand band;
    band.alpha = alpha;
    band.resamples = B;
    band.center = average(landscapes);

    const std::size_t n = landscapes.size();
    std::vector<double> deviations(B);
    Landscape mean;
    for (std::size_t b = 0; b < B; ++b) {
        Rng rng = Rng::stream(seed, b);
        mean = Landscape{band.center.t_max, band.center.depth, band.center.grid,
                         std::vector<double>(band.center.values.size(), 0.0)};
        for (std::size_t k = 0; k < n; ++k) accumulate(mean, landscapes[rng.next_below(n)]);
        for (double& v : mean.values) v /= static_cast<double>(n);
        deviations[b] = linf_distance(mean, band.center);
    }
    std::sort(deviations.begin(), deviations.end());
    // Inclusive empirical quantile: the ceil((1 - alpha) * B)-th smallest.
    auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(B)));
    rank = std::clamp<std::size_t>(rank, 1, B);
    band.half_width = deviations[rank - 1];
    return band;
}

ConfidenceBand bootstrap_band_subsampled(const PointCloud& cloud, const SubsampleScheme& scheme,
                                         const PipelineParams& params, double alpha, std::size_t B,
                                         std::uint64_t band_seed) {
    const double t_max = resolve_t_max(cloud, params);
    const auto landscapes = subsample_landscapes(cloud, scheme, params, t_max, nullptr);
    return bootstrap_band(landscapes, alpha, B, band_seed);
}

DissimilarityResult dissimilarity_matrix(const std::vector<PointCloud>& clouds,
                                         const std::vector<std::string>& labels, const SubsampleScheme& scheme,
                                         const PipelineParams& params) {
    require(!clouds.empty(), "empty-set", "no clouds to compare");
    require(labels.size() == clouds.size(), "validation",
            std::to_string(labels.size()) + " labels for " + std::to_string(clouds.size()) + " clouds");
    // One shared grid endpoint so the landscapes are comparable.
    PipelineParams shared = params;
    if (shared.t_max <= 0.0) {
        double t = 0.0;
        for (const PointCloud& c : clouds) t = std::max(t, 2.0 * c.diameter());
        require(t > 0.0, "validation", "cannot resolve grid endpoint: all clouds have zero diameter");
        shared.t_max = t;
    }

    const std::size_t n = clouds.size();
    std::vector<Landscape> averages(n);
    for (std::size_t i = 0; i < n; ++i) averages[i] = average_landscape(clouds[i], scheme, shared).estimate;

    DissimilarityResult result;
    result.labels = labels;
    result.matrix.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = linf_distance(averages[i], averages[j]);
            result.matrix[i * n + j] = d;
            result.matrix[j * n + i] = d;
        }
    }
    return result;
}

void write_dissimilarity_csv(const std::string& path, const DissimilarityResult& result) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "io", "cannot open " + path + " for writing");
    const std::size_t n = result.labels.size();
    out << "label";
    for (const std::string& l : result.labels) out << ',' << l;
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        out << result.labels[i];
        for (std::size_t j = 0; j < n; ++j) out << ',' << format_double(result.matrix[i * n + j]);
        out << '\n';
    }
    require(out.good(), "io", "failed writing " + path);
}

HausdorffEstimate estimate_expected_hausdorff(const PointCloud& cloud, std::size_t m, std::size_t draws,
                                              std::uint64_t seed, bool replacement) {
    require(draws >= 1, "validation", "need at least one draw");
    std::vector<std::uint32_t> all(cloud.size());
    std::iota(all.begin(), all.end(), 0u);
    HausdorffEstimate est;
    est.draws.resize(draws);
    for (std::size_t b = 0; b < draws; ++b) {
        const auto idx = sample_one(cloud.size(), m, replacement, seed, b);
        est.draws[b] = hausdorff_subsets(cloud, all, idx);
    }
    est.mean = std::accumulate(est.draws.begin(), est.draws.end(), 0.0) / static_cast<double>(draws);
    if (draws >= 2) {
        double ss = 0.0;
        for (double d : est.draws) ss += (d - est.mean) * (d - est.mean);
        est.standard_error = std::sqrt(ss / static_cast<double>(draws - 1) / static_cast<double>(draws));
    }
    return est;
}

// --- closed-form bound evaluators -------------------------------------------

double bound_rm(double a, double b, std::size_t m) {
    require(a > 0.0 && b > 0.0, "validation", "standard-assumption constants must be positive");
    require(m >= 2, "m-too-small", "subsample size m must be >= 2 so that log m > 0");
    const double lg = std::log(static_cast<double>(m));
    return 2.0 * std::pow(lg / (a * static_cast<double>(m)), 1.0 / b);
}

double bound_average_bias(const StandardAssumption& assumption, std::size_t m, double c1) {
    require(c1 >= 0.0, "validation", "c1 must be nonnegative");
    require(assumption.r0 >= 0.0, "validation", "r0 must be nonnegative");
    const double rm = bound_rm(assumption.a, assumption.b, m);
    const double lg = std::log(static_cast<double>(m));
    const double indicator = rm > assumption.r0 ? rm : 0.0;
    return assumption.r0 + indicator + c1 * rm / (lg * lg);
}

double bound_closest(const StandardAssumption& assumption, std::size_t m, std::size_t n, double c2) {
    require(c2 >= 0.0, "validation", "c2 must be nonnegative");
    require(assumption.r0 >= 0.0, "validation", "r0 must be nonnegative");
    require(assumption.a > 0.0 && assumption.b > 0.0, "validation",
            "standard-assumption constants must be positive");
    require(n >= 1, "validation", "need at least one subsample");
    require(m >= 1, "validation", "subsample size m must be >= 1");
    // log(2^b m) = b log 2 + log m
    const double lg = assumption.b * std::log(2.0) + std::log(static_cast<double>(m));
    require(lg > 0.0, "m-too-small", "log(2^b m) must be positive");
    const double rmp = 2.0 * std::pow(lg / (assumption.a * static_cast<double>(m)), 1.0 / assumption.b);
    const double indicator = rmp > assumption.r0 ? rmp : 0.0;
    const double third = c2 * rmp / (static_cast<double>(n) * std::pow(lg, static_cast<double>(n) + 1.0));
    return assumption.r0 + indicator + third;
}

double bound_stability_hausdorff(const StandardAssumption& assumption, std::size_t m,
                                 double hausdorff_distance, double c1) {
    require(std::isfinite(hausdorff_distance) && hausdorff_distance >= 0.0, "validation",
            "hausdorff distance must be finite and nonnegative");
    require(c1 >= 0.0, "validation", "c1 must be nonnegative");
    require(assumption.r0 >= 0.0, "validation", "r0 must be nonnegative");
    const double rm = bound_rm(assumption.a, assumption.b, m);
    const double lg = std::log(static_cast<double>(m));
    const double indicator = rm > assumption.r0 ? rm : 0.0;
    return hausdorff_distance + 2.0 * assumption.r0 + 2.0 * indicator + 2.0 * c1 * rm / (lg * lg);
}

double compute_r0_discrete(double k_const, double v_const, double a_prime, double b, std::size_t n_points) {
    require(k_const > 0.0 && v_const > 0.0 && a_prime > 0.0 && b > 0.0, "validation",
            "r0 constants must be positive");
    require(n_points >= 2, "validation", "need at least 2 points so that log N > 0");
    const auto n = static_cast<double>(n_points);
    return std::pow(k_const * v_const / a_prime * std::log(n) / n, 1.0 / b);
}

// --- risk curves ---------------------------------------------------------------

RiskCurves risk_curves(const PointCloud& cloud, const RiskCurveParams& rc, const PipelineParams& params) {
    require(!rc.m_values.empty() && !rc.n_values.empty(), "validation", "risk curves need m and n lists");
    require(rc.replications >= 1 && rc.bias_draws >= 1, "validation",
            "risk curves need at least one draw per point");
    RiskCurves out;
    out.m_values = rc.m_values;
    out.n_values = rc.n_values;

    // Bias proxy: expected Hausdorff distance of an m-point subsample.
    out.bias.reserve(rc.m_values.size());
    for (std::size_t mi = 0; mi < rc.m_values.size(); ++mi) {
        const auto est =
            estimate_expected_hausdorff(cloud, rc.m_values[mi], rc.bias_draws, derive_seed(rc.seed, 1000 + mi));
        out.bias.push_back(est.mean);
    }

    // Variance proxy: mean sup-distance of an n-subsample average to a
    // high-n reference average, over independent replications.
    PipelineParams shared = params;
    shared.t_max = resolve_t_max(cloud, params);
    SubsampleScheme ref_scheme;
    ref_scheme.m = rc.m_fixed;
    ref_scheme.n = rc.reference_n;
    ref_scheme.seed = derive_seed(rc.seed, 1);
    const Landscape reference = average_landscape(cloud, ref_scheme, shared).estimate;

    out.variance.reserve(rc.n_values.size());
    for (std::size_t ni = 0; ni < rc.n_values.size(); ++ni) {
        double sum = 0.0;
        for (std::size_t r = 0; r < rc.replications; ++r) {
            SubsampleScheme s;
            s.m = rc.m_fixed;
            s.n = rc.n_values[ni];
            s.seed = derive_seed(rc.seed, 2 + ni * rc.replications + r);
            sum += linf_distance(average_landscape(cloud, s, shared).estimate, reference);
        }
        out.variance.push_back(sum / static_cast<double>(rc.replications));
    }

    auto strictly_decreasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i] < v[i - 1])) return false;
        return true;
    };
    out.bias_monotone = strictly_decreasing(out.bias);
    out.variance_monotone = strictly_decreasing(out.variance);
    return out;
}

}  // namespace tda
