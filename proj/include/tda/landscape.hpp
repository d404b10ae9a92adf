#pragma once

#include <span>
#include <string>
#include <vector>

#include "tda/persistence.hpp"

namespace tda {

// Persistence landscape sampled on a uniform grid over [0, T]: depth K
// layers by grid G columns, values[k*G + g] = lambda(k+1, t_g) with
// t_g = g * T / (G - 1).  Layer k is the k-th largest tent value over the
// diagram's points of one homology dimension.
struct Landscape {
    double t_max = 0.0;
    std::size_t depth = 0;
    std::size_t grid = 0;
    std::vector<double> values;

    double dt() const { return t_max / static_cast<double>(grid - 1); }
    const double* layer(std::size_t k) const { return values.data() + k * grid; }
    double* layer(std::size_t k) { return values.data() + k * grid; }
    double at(std::size_t k, std::size_t g) const { return values[k * grid + g]; }
    double sup() const;
    bool same_grid(const Landscape& other) const {
        return t_max == other.t_max && depth == other.depth && grid == other.grid;
    }
};

// Tent function of one diagram point: max(0, min(t - birth, death - t)).
double tent(double birth, double death, double t);

Landscape build_landscape(const PersistenceDiagram& diagram, int dim, std::size_t depth, std::size_t grid);

// Sup-norm distance over the grid; requires identical (T, depth, grid).
double linf_distance(const Landscape& a, const Landscape& b);

Landscape average(std::span<const Landscape> landscapes);

// Streaming accumulation used by the estimators: acc += x, then finish by
// scaling; all additions happen in caller-supplied (index) order.
void accumulate(Landscape& acc, const Landscape& x);

// CSV with header "t,k1,...,kK" and G data rows.
void write_landscape_csv(const std::string& path, const Landscape& l);
Landscape read_landscape_csv(const std::string& path, double t_max_hint = -1.0);

}  // namespace tda
