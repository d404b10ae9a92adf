#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tda/common.hpp"

namespace tda {

// Immutable finite metric space: either a Euclidean point set (coordinates
// stored axis-major so the SIMD kernels can stream over points) or an
// explicit distance matrix.  All library inputs are validated on
// construction; downstream code can assume a well-formed space.
class PointCloud {
public:
    enum class Metric { euclidean, explicit_matrix };

    // points are row-major (point-major); transposed internally.
    static PointCloud from_points(const std::vector<double>& row_major, std::size_t count, std::size_t dim);

    struct MatrixCheck {
        double symmetry_tol = 1e-12;
        double triangle_tol = 1e-9;
        // Triangle inequality is spot-checked on min(N^3, sampled_triples)
        // random triples by default; full sweep on request.
        std::size_t sampled_triples = 100000;
        bool full_triangle_check = false;
        std::uint64_t seed = 0;
    };
    static PointCloud from_distance_matrix(const std::vector<double>& matrix, std::size_t count,
                                           const MatrixCheck& check);
    static PointCloud from_distance_matrix(const std::vector<double>& matrix, std::size_t count);

    std::size_t size() const noexcept { return count_; }
    std::size_t dim() const noexcept { return dim_; }
    Metric metric() const noexcept { return metric_; }

    double dist(std::size_t i, std::size_t j) const;
    double sq_dist(std::size_t i, std::size_t j) const;

    // Axis-major coordinate block (euclidean only): element [d*size() + j].
    const double* soa() const;
    std::vector<double> point(std::size_t i) const;

    // New cloud holding the selected points (duplicates allowed).  For an
    // explicit-matrix cloud the submatrix is gathered.
    PointCloud gather(std::span<const std::uint32_t> indices) const;

    double diameter() const;
    // min over x of max over y of d(x, y); the Rips filtration above this
    // value is a cone, so it is the cheapest exactness-preserving threshold.
    double enclosing_radius() const;

    const std::vector<double>& matrix() const;

    // Empty placeholder (size 0); every factory validates its input.
    PointCloud() = default;

private:
    Metric metric_ = Metric::euclidean;
    std::size_t count_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> coords_;  // axis-major, euclidean only
    std::vector<double> matrix_;  // row-major N*N, explicit metric only
};

// --- synthetic shapes ------------------------------------------------------

struct SyntheticShape {
    enum class Kind { circle, sphere, torus, uniform_cube };
    Kind kind = Kind::circle;
    double radius = 1.0;       // circle / sphere
    double ring_radius = 2.0;  // torus: distance from axis to tube center
    double tube_radius = 0.5;  // torus: tube radius (< ring_radius)
    double side = 1.0;         // uniform_cube edge length
    double noise_sigma = 0.0;  // isotropic Gaussian noise added per axis
};

SyntheticShape::Kind shape_kind_from_name(const std::string& name);
PointCloud sample_shape(const SyntheticShape& shape, std::size_t count, std::uint64_t seed);

// --- subsampling ------------------------------------------------------------

struct SubsampleScheme {
    std::size_t m = 100;       // points per subsample
    std::size_t n = 30;        // number of subsamples
    std::uint64_t seed = 0;
    bool replacement = true;   // iid from the empirical measure by default
};

// n index lists of length m; subsample i is drawn from the stream derived
// from (seed, i), so results do not depend on evaluation order or thread
// count.  Without replacement requires m <= cloud size.
std::vector<std::vector<std::uint32_t>> sample_iid(const PointCloud& cloud, const SubsampleScheme& scheme);
std::vector<std::uint32_t> sample_one(std::size_t population, std::size_t m, bool replacement,
                                      std::uint64_t seed, std::uint64_t stream_id);

// --- distances between subsets ----------------------------------------------

double hausdorff(const PointCloud& a, const PointCloud& b);
// Hausdorff distance between two index subsets of one cloud (any metric).
double hausdorff_subsets(const PointCloud& cloud, std::span<const std::uint32_t> a,
                         std::span<const std::uint32_t> b);

// --- CSV I/O ----------------------------------------------------------------

// Numeric CSV with an optional header row (auto-detected: first row that
// fails to parse as numbers is treated as a header and skipped).
PointCloud read_point_csv(const std::string& path);
PointCloud read_matrix_csv(const std::string& path, const PointCloud::MatrixCheck& check = PointCloud::MatrixCheck{});
void write_point_csv(const std::string& path, const PointCloud& cloud);

std::vector<std::vector<double>> read_csv_rows(const std::string& path, bool* had_header);

}  // namespace tda
