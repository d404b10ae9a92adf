#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tda/landscape.hpp"
#include "tda/pointcloud.hpp"
#include "tda/rips.hpp"

namespace tda {

// Shared configuration of the subsample -> Rips -> diagram -> landscape
// pipeline.  One t_max is resolved per run so every landscape in a batch
// lives on the same grid.
struct PipelineParams {
    RipsParams rips;
    int landscape_dim = 1;
    std::size_t depth = 1;   // landscape layers (K)
    std::size_t grid = 1024; // grid columns (G)
    double t_max = 0.0;      // <= 0 resolves to 2 * diameter(reference cloud)
    unsigned threads = 1;
};

double resolve_t_max(const PointCloud& reference, const PipelineParams& params);

PersistenceDiagram cloud_diagram(const PointCloud& cloud, const PipelineParams& params, double t_max);
Landscape cloud_landscape(const PointCloud& cloud, const PipelineParams& params, double t_max);
Landscape subsample_landscape(const PointCloud& cloud, std::span<const std::uint32_t> indices,
                              const PipelineParams& params, double t_max);

struct SubsampleDiagnostic {
    std::uint32_t index = 0;
    std::optional<double> hausdorff_to_reference;
    std::size_t diagram_size = 0;
};

struct EstimatorReport {
    Landscape estimate;
    std::vector<SubsampleDiagnostic> diagnostics;
    SubsampleScheme scheme;
    // Informational only; never serialized into artifacts so that re-runs
    // stay byte-identical.
    double wall_seconds = 0.0;
    // closest_sample_landscape: which subsample won (lowest index on ties).
    std::size_t selected_index = std::numeric_limits<std::size_t>::max();
};

// Mean landscape over n iid m-point subsamples.
EstimatorReport average_landscape(const PointCloud& cloud, const SubsampleScheme& scheme,
                                  const PipelineParams& params);

// Landscape of the subsample closest to the full cloud in Hausdorff distance.
EstimatorReport closest_sample_landscape(const PointCloud& cloud, const SubsampleScheme& scheme,
                                         const PipelineParams& params);

struct ConfidenceBand {
    Landscape center;
    double half_width = 0.0;
    double alpha = 0.05;
    std::size_t resamples = 0;
};

// Uniform bootstrap band around the mean landscape: half-width is the
// (1 - alpha) empirical quantile (inclusive, ceil((1-alpha)*B)-th smallest)
// of sup-norm deviations of resampled means.
ConfidenceBand bootstrap_band(const std::vector<Landscape>& landscapes, double alpha, std::size_t B,
                              std::uint64_t seed);
ConfidenceBand bootstrap_band_subsampled(const PointCloud& cloud, const SubsampleScheme& scheme,
                                         const PipelineParams& params, double alpha, std::size_t B,
                                         std::uint64_t band_seed);

struct DissimilarityResult {
    std::vector<std::string> labels;
    std::vector<double> matrix;  // row-major n x n of sup-norm distances
};

// Pairwise sup-norm distances between per-cloud average landscapes; each
// average is computed exactly once.
DissimilarityResult dissimilarity_matrix(const std::vector<PointCloud>& clouds,
                                         const std::vector<std::string>& labels,
                                         const SubsampleScheme& scheme, const PipelineParams& params);
void write_dissimilarity_csv(const std::string& path, const DissimilarityResult& result);

struct HausdorffEstimate {
    double mean = 0.0;
    std::optional<double> standard_error;  // absent when draws == 1
    std::vector<double> draws;
};

HausdorffEstimate estimate_expected_hausdorff(const PointCloud& cloud, std::size_t m, std::size_t draws,
                                              std::uint64_t seed, bool replacement = true);

// --- closed-form bound evaluators -------------------------------------------

// (a, b, r0)-standard assumption constants: mu(B(x, r)) >= min(1, a r^b) for
// all r > r0.
struct StandardAssumption {
    double a = 1.0;
    double b = 1.0;
    double r0 = 0.0;
};

// r_m = 2 (log m / (a m))^{1/b}
double bound_rm(double a, double b, std::size_t m);

// Average-estimator bias cap: r0 + r_m 1{r_m > r0} + c1 r_m / (log m)^2
double bound_average_bias(const StandardAssumption& assumption, std::size_t m, double c1);

// Closest-sample risk cap with r_m' = 2 (log(2^b m) / (a m))^{1/b}:
// r0 + r_m' 1{r_m' > r0} + c2 r_m' / (n [log(2^b m)]^{n+1})
double bound_closest(const StandardAssumption& assumption, std::size_t m, std::size_t n, double c2);

// Hausdorff-form stability cap:
// H + 2 r0 + 2 r_m 1{r_m > r0} + 2 c1 r_m / (log m)^2
double bound_stability_hausdorff(const StandardAssumption& assumption, std::size_t m,
                                 double hausdorff_distance, double c1);

// Effective r0 for an N-point discrete sample of a nice measure:
// (K v / a' * log N / N)^{1/b}
double compute_r0_discrete(double k_const, double v_const, double a_prime, double b, std::size_t n_points);

// --- risk curves ---------------------------------------------------------------

struct RiskCurves {
    std::vector<std::size_t> m_values;
    std::vector<double> bias;  // E H(subsample, cloud) per m
    std::vector<std::size_t> n_values;
    std::vector<double> variance;  // E ||avg_n - reference||_inf per n
    bool bias_monotone = false;
    bool variance_monotone = false;
};

struct RiskCurveParams {
    std::vector<std::size_t> m_values = {25, 100, 400};
    std::vector<std::size_t> n_values = {5, 20, 80};
    std::size_t m_fixed = 100;       // subsample size for the variance curve
    std::size_t bias_draws = 200;    // MC draws per bias point
    std::size_t replications = 8;    // replications per variance point
    std::size_t reference_n = 400;   // subsamples in the variance reference mean
    std::uint64_t seed = 0;
};

RiskCurves risk_curves(const PointCloud& cloud, const RiskCurveParams& rc, const PipelineParams& params);

}  // namespace tda
