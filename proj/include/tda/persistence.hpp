#pragma once

#include <string>
#include <vector>

#include "tda/rips.hpp"

namespace tda {

struct DiagramPoint {
    int dim;
    double birth;
    double death;
};

// Multiset of finite (birth, death) pairs per homology dimension, truncated
// to [0, T]: features still alive at the filtration threshold get death = T,
// points born at or after T are dropped, and zero-persistence points are
// never stored.  Points are kept sorted by (dim, birth, death).
struct PersistenceDiagram {
    double t_max = 0.0;
    std::vector<DiagramPoint> points;

    std::vector<DiagramPoint> points_of_dim(int dim) const;
    std::size_t count_of_dim(int dim) const;
};

// Z/2 persistent homology of a Rips filtration: union-find for dimension 0,
// column reduction with the twist/clearing optimization (top dimension
// first) for dimensions >= 1.
PersistenceDiagram compute_diagram(const Filtration& filtration, double t_max);

// Exact bottleneck distance between the dim-parts of two diagrams (diagonal
// matching allowed): binary search over candidate values with a
// Hopcroft-Karp feasibility test.  Requires matching t_max.
double bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b, int dim);

std::string diagram_to_json(const PersistenceDiagram& d);
void write_diagram_json(const std::string& path, const PersistenceDiagram& d);

}  // namespace tda
