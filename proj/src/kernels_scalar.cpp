#include "tda/kernels.hpp"

#include <cmath>

namespace tda::kernels {
namespace {

void sq_dist_batch_scalar(const double* q, const double* coords, std::size_t n, std::size_t dim, double* out) {
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            double diff = q[d] - coords[d * n + j];
            acc += diff * diff;
        }
        out[j] = acc;
    }
}

double min_sq_dist_scalar(const double* q, const double* coords, std::size_t n, std::size_t dim) {
    double best = HUGE_VAL;
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            double diff = q[d] - coords[d * n + j];
            acc += diff * diff;
        }
        if (acc < best) best = acc;
    }
    return best;
}

double max_abs_diff_scalar(const double* a, const double* b, std::size_t n) {
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double diff = std::fabs(a[i] - b[i]);
        if (diff > best) best = diff;
    }
    return best;
}

void add_assign_scalar(double* acc, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void scale_scalar(double* x, std::size_t n, double s) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}

void tent_max_scalar(double* row, std::size_t g_count, double t0, double dt, double birth, double death) {
    for (std::size_t g = 0; g < g_count; ++g) {
        double t = static_cast<double>(g) * dt + t0;
        double up = t - birth;
        double down = death - t;
        double v = up < down ? up : down;
        if (v < 0.0) v = 0.0;
        if (v > row[g]) row[g] = v;
    }
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops = {
        &sq_dist_batch_scalar, &min_sq_dist_scalar, &max_abs_diff_scalar,
        &add_assign_scalar,    &scale_scalar,       &tent_max_scalar,
        "scalar",
    };
    return ops;
}

}  // namespace tda::kernels
