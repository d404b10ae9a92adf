#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tda/pointcloud.hpp"

namespace tda {

struct RipsParams {
    // Maximum homology dimension; the complex includes simplices one
    // dimension higher so that features of this dimension can die.
    int max_dim = 1;

    enum class ThresholdPolicy { enclosing, diameter, fixed };
    // Enclosing radius by default: above it the complex is a cone, so the
    // diagram is identical to the diameter threshold at lower cost.
    ThresholdPolicy policy = ThresholdPolicy::enclosing;
    double threshold_value = 0.0;  // used when policy == fixed (must be >= 0)

    // Hard cap on the estimated total simplex count.
    double budget = 5e7;
    int max_dim_cap = 3;
    std::size_t distance_cache_cap = 4096;
};

double resolve_threshold(const PointCloud& cloud, const RipsParams& params);

// One simplex: filtration value plus the colex-packed ascending vertex tuple.
struct SimplexEntry {
    double value;
    std::uint64_t key;
};

// Vietoris-Rips filtration under the diameter convention: a simplex enters
// at the maximum pairwise distance of its vertices.  Simplices are stored
// per dimension sorted by (value, lexicographic vertex order); the global
// filtration order is (value, dim, lex).
class Filtration {
public:
    std::size_t vertex_count() const noexcept { return n_; }
    int max_homology_dim() const noexcept { return max_dim_; }
    int max_simplex_dim() const noexcept { return static_cast<int>(dims_.size()) - 1; }
    double threshold() const noexcept { return threshold_; }

    std::size_t count(int d) const;
    double value(int d, std::size_t i) const;
    std::uint64_t key(int d, std::size_t i) const;
    const std::vector<SimplexEntry>& entries(int d) const;
    // Ascending vertex tuple of simplex i of dimension d (d+1 entries used).
    std::array<std::uint32_t, 5> vertices(int d, std::size_t i) const;

    // "value dim v0 v1 ..." lines in global filtration order.
    void dump(const std::string& path) const;

private:
    friend Filtration build_rips(const PointCloud&, const RipsParams&);
    std::size_t n_ = 0;
    int max_dim_ = 0;
    double threshold_ = 0.0;
    std::vector<std::vector<SimplexEntry>> dims_;
};

Filtration build_rips(const PointCloud& cloud, const RipsParams& params);
Filtration build_rips(const PointCloud& cloud, int max_dim, double threshold);

// Exact per-dimension simplex counts for simplex dimensions 0..max_simplex_dim
// (same enumeration as build_rips, nothing stored).
std::vector<std::size_t> count_simplices(const PointCloud& cloud, int max_simplex_dim, double threshold);

// Cheap upper bound used for the budget check: sum over vertices v of
// C(lower_degree(v), d) bounds the number of d-simplices.
std::vector<double> estimate_simplex_counts(const PointCloud& cloud, int max_simplex_dim, double threshold);

// Packed-key helpers (colex rank of an ascending vertex tuple of dim+1
// entries).  Tuples must fit in 64 bits; build_rips validates this.
std::uint64_t pack_simplex(const std::uint32_t* vertices, int dim);
void unpack_simplex(std::uint64_t key, int dim, std::uint32_t* out);
// a < b lexicographically, comparing the unpacked ascending tuples.
bool lex_less(std::uint64_t a, std::uint64_t b, int dim);

}  // namespace tda
