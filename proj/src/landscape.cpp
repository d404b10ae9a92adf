#include "tda/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tda/kernels.hpp"

namespace tda {

double tent(double birth, double death, double t) {
    double up = t - birth;
    double down = death - t;
    double v = up < down ? up : down;
    return v < 0.0 ? 0.0 : v;
}

double Landscape::sup() const {
    double best = 0.0;
    for (double v : values)
        if (v > best) best = v;
    return best;
}

Landscape build_landscape(const PersistenceDiagram& diagram, int dim, std::size_t depth, std::size_t grid) {
    require(depth >= 1, "validation", "landscape depth must be >= 1");
    require(grid >= 2, "validation", "landscape grid must have at least 2 points");
    require(std::isfinite(diagram.t_max) && diagram.t_max > 0.0, "validation",
            "landscape requires a positive truncation value");

    Landscape l;
    l.t_max = diagram.t_max;
    l.depth = depth;
    l.grid = grid;
    l.values.assign(depth * grid, 0.0);
    double dt = l.dt();

    if (depth == 1) {
        // Fast path: the first layer is a running max of tents over the grid.
        const auto& ops = kernels::active();
        for (const auto& p : diagram.points) {
            if (p.dim != dim) continue;
            ops.tent_max(l.values.data(), grid, 0.0, dt, p.birth, p.death);
        }
        return l;
    }

    // General depth: per grid column keep the K largest tent values via
    // insertion into the (descending) column.
    for (const auto& p : diagram.points) {
        if (p.dim != dim) continue;
        for (std::size_t g = 0; g < grid; ++g) {
            double t = static_cast<double>(g) * dt;
            double v = tent(p.birth, p.death, t);
            if (v <= 0.0) continue;
            // insert v into the descending column at this grid point
            std::size_t k = depth;
            while (k > 0 && l.values[(k - 1) * grid + g] < v) --k;
            if (k >= depth) continue;
            for (std::size_t s = depth - 1; s > k; --s) l.values[s * grid + g] = l.values[(s - 1) * grid + g];
            l.values[k * grid + g] = v;
        }
    }
    return l;
}

double linf_distance(const Landscape& a, const Landscape& b) {
    require(a.same_grid(b), "grid-mismatch",
            "landscapes must share (T, depth, grid) for a sup-norm distance");
    return kernels::active().max_abs_diff(a.values.data(), b.values.data(), a.values.size());
}

void accumulate(Landscape& acc, const Landscape& x) {
    require(acc.same_grid(x), "grid-mismatch", "landscapes must share (T, depth, grid) to accumulate");
    kernels::active().add_assign(acc.values.data(), x.values.data(), acc.values.size());
}

Landscape average(std::span<const Landscape> landscapes) {
    require(!landscapes.empty(), "empty-average", "cannot average zero landscapes");
    Landscape acc = landscapes[0];
    for (std::size_t i = 1; i < landscapes.size(); ++i) accumulate(acc, landscapes[i]);
    kernels::active().scale(acc.values.data(), acc.values.size(), 1.0 / static_cast<double>(landscapes.size()));
    return acc;
}

void write_landscape_csv(const std::string& path, const Landscape& l) {
    std::ofstream out(path);
    require(out.good(), "io", "cannot write '" + path + "'");
    out << "t";
    for (std::size_t k = 0; k < l.depth; ++k) out << ",k" << (k + 1);
    out << "\n";
    double dt = l.dt();
    for (std::size_t g = 0; g < l.grid; ++g) {
        // Last row is exactly T so that a read-back landscape shares the grid.
        out << format_double(g + 1 == l.grid ? l.t_max : static_cast<double>(g) * dt);
        for (std::size_t k = 0; k < l.depth; ++k) out << ',' << format_double(l.at(k, g));
        out << "\n";
    }
    require(out.good(), "io", "write failed for '" + path + "'");
}

Landscape read_landscape_csv(const std::string& path, double t_max_hint) {
    bool had_header = false;
    auto rows = read_csv_rows(path, &had_header);
    require(rows.front().size() >= 2, "parse", "landscape CSV needs a t column and at least one layer");
    Landscape l;
    l.grid = rows.size();
    require(l.grid >= 2, "parse", "landscape CSV needs at least 2 grid rows");
    l.depth = rows.front().size() - 1;
    // The written grid ends exactly at T.
    l.t_max = t_max_hint > 0 ? t_max_hint : rows.back()[0];
    l.values.assign(l.depth * l.grid, 0.0);
    for (std::size_t g = 0; g < l.grid; ++g)
        for (std::size_t k = 0; k < l.depth; ++k) l.values[k * l.grid + g] = rows[g][k + 1];
    return l;
}

}  // namespace tda
