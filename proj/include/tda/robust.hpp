#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tda/estimators.hpp"
#include "tda/pointcloud.hpp"

namespace tda {

// --- density / distance outlier scores ---------------------------------------

enum class KernelType { gaussian, epanechnikov };
KernelType kernel_type_from_name(const std::string& name);

struct KdeParams {
    double bandwidth = 0.1;
    KernelType kernel = KernelType::gaussian;
    // Multiply by the kernel's density normalization 1 / (h^D * int K);
    // requires Euclidean coordinates (D is the ambient dimension).
    bool normalized = false;
};

// score_i = (1/N) sum_j K(d(i, j) / h); higher = denser.
std::vector<double> kde_scores(const PointCloud& cloud, const KdeParams& params);

// score_i = -(distance to the k-th nearest other point); higher = denser.
std::vector<double> knn_scores(const PointCloud& cloud, std::size_t k);

struct FilterResult {
    PointCloud cloud;
    std::vector<std::uint32_t> kept;  // original indices, ascending
    double threshold = 0.0;
    double min_score = 0.0;
    double max_score = 0.0;
};

// Keeps points with score strictly above the threshold.
FilterResult filtered_cloud(const PointCloud& cloud, const std::vector<double>& scores, double threshold);

// --- outlier robustness experiment --------------------------------------------

// One run of the planted-outlier experiment: X is a circle sample, Y swaps
// one circle point for the center.  Compares how far the full-sample,
// average, and closest-sample landscapes move, against the m/N transport
// cap, and how close the Y-side estimates stay to the clean (outlier-free)
// landscape.
struct OutlierParams {
    std::size_t n_points = 500;  // circle sample size N
    std::size_t m = 100;         // subsample size
    std::size_t n = 30;          // subsamples per estimator
    double threshold = 1.9;      // fixed Rips threshold for the circle-only full runs
    double guard_margin = 0.05;  // full-run dim-1 deaths must stay below threshold - margin
    double t_max = 4.0;          // shared landscape grid endpoint
    std::size_t grid = 1024;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct OutlierReport {
    // sup-norm gaps between the X and Y versions of each arm
    double gap_full = 0.0;
    double gap_avg = 0.0;
    double gap_closest = 0.0;
    double cap = 0.0;         // m/N: transport bound on the expected average gap
    double avg_stderr = 0.0;  // joint MC stderr of the average gap at its argmax
    double grid_error = 0.0;
    bool violated = false;  // gap_avg > cap + 3*stderr + grid_error

    // distance of each Y-side estimate to the clean full-sample landscape
    double full_to_clean = 0.0;
    double avg_to_clean = 0.0;
    double closest_to_clean = 0.0;
    bool avg_beats_closest = false;
    bool closest_infected = false;  // selected Y subsample contains the planted point

    double max_dim1_death = 0.0;  // over the full circle-only runs
    bool guard_ok = false;
    std::uint64_t seed = 0;
};

OutlierReport outlier_experiment(const OutlierParams& params);

}  // namespace tda
