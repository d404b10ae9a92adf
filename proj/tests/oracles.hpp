#pragma once

// Independent reference implementations used only by tests.  Everything here
// is brute force and first-principles: subset enumeration for complexes,
// GF(2) matrix ranks for persistence, exhaustive matchings for bottleneck,
// permutation search for transport, and direct tent evaluation for
// landscapes.  Slow on purpose; run at tiny sizes.

#include <cstdint>
#include <vector>

#include "tda/persistence.hpp"
#include "tda/pointcloud.hpp"

namespace oracles {

struct OracleSimplex {
    double value;
    std::vector<std::uint32_t> verts;  // ascending
};

// All simplices of dimension 0..max_simplex_dim with diameter <= threshold,
// by subset enumeration; per-dimension lists sorted by (value, lex).
std::vector<std::vector<OracleSimplex>> oracle_simplices(const tda::PointCloud& cloud, int max_simplex_dim,
                                                         double threshold);

// Persistence diagram over Z/2 from persistent Betti numbers
// beta_q^{i,j} = dim Z_q(K_i) - dim (B_q(K_j) intersect C_q(K_i)),
// computed with boundary-matrix ranks and inclusion-exclusion.
tda::PersistenceDiagram oracle_diagram(const tda::PointCloud& cloud, int max_dim, double threshold,
                                       double t_max);

// Exhaustive bottleneck distance over all partial matchings.
double oracle_bottleneck(const tda::PersistenceDiagram& a, const tda::PersistenceDiagram& b, int dim);

// Exact W_p between equal-size uniform atom sets by permutation search.
double oracle_wasserstein_permutation(const tda::PointCloud& a, const tda::PointCloud& b, double p);

// k-th largest tent value at t (k is 1-based), directly from the diagram.
double oracle_landscape_value(const tda::PersistenceDiagram& d, int dim, std::size_t k, double t);

}  // namespace oracles
