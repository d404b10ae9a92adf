#pragma once

#include <cstdint>
#include <vector>

#include "tda/landscape.hpp"
#include "tda/pointcloud.hpp"

namespace tda {

// Finitely supported probability measure on a Euclidean point set.
struct DiscreteMeasure {
    PointCloud support;
    std::vector<double> weights;  // nonnegative, sum to 1 (validated)
};

DiscreteMeasure uniform_measure(PointCloud cloud);
void validate_measure(const DiscreteMeasure& mu);

struct TransportParams {
    // Exact-solver cap on the combined support size.
    std::size_t support_cap = 512;
    // Fixed-point fallback scale when weights are not recognized as small
    // rationals; introduces at most ~1e-6 relative mass slack.
    std::uint64_t fallback_scale = 1000000000ULL;
};

// Exact p-Wasserstein distance (ground metric: Euclidean) via successive
// shortest paths on the scaled transportation network.  Equal-size,
// equal-weight inputs short-circuit to the Hungarian assignment solver.
double wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                   const TransportParams& params = TransportParams{});

// Internal pieces exposed for cross-checking in tests.
double wasserstein_flow(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                        const TransportParams& params);
double assignment_cost_hungarian(const std::vector<double>& cost, std::size_t n);

// Integer masses after scaling; sums of both outputs are equal.
void scale_weights(const std::vector<double>& wa, const std::vector<double>& wb,
                   std::uint64_t fallback_scale, std::vector<std::uint64_t>& out_a,
                   std::vector<std::uint64_t>& out_b, std::uint64_t& total);

struct StabilityReport {
    double lhs = 0.0;           // || mean landscape(mu) - mean landscape(nu) ||_inf
    double mc_stderr = 0.0;     // joint MC standard error at the argmax grid point
    double w_distance = 0.0;    // W_p(mu, nu)
    double rhs = 0.0;           // m^{1/p} * W_p
    double grid_error = 0.0;    // T / (G - 1)
    double margin = 0.0;        // rhs + 3*stderr + grid_error - lhs
    bool violated = false;
    std::size_t trials = 0;
    std::size_t m = 0;
    double p = 1.0;
};

struct PipelineParams;  // defined in estimators.hpp

// Monte-Carlo check of the expected-landscape stability bound
// ||E lambda_mu - E lambda_nu||_inf <= m^{1/p} W_p(mu, nu): draws `trials`
// m-point iid samples per side, averages their landscapes, and flags a
// violation only beyond 3 MC standard errors plus the grid error.
StabilityReport verify_stability_wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                             std::size_t m, double p, std::size_t trials,
                                             std::uint64_t seed, const PipelineParams& pipeline,
                                             const TransportParams& transport = TransportParams{});

}  // namespace tda
