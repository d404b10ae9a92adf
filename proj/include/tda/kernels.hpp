#pragma once

#include <cstddef>
#include <string>

namespace tda::kernels {

// Hot numeric loops, implemented once as portable scalar code and once per
// SIMD ISA, selected at runtime.  Point coordinates are laid out
// axis-major (SoA): coords[d * n + j] is coordinate d of point j, so lanes
// run over points.
//
// Every SIMD variant performs the same per-element operations in the same
// order as the scalar reference (multiply then add, no FMA contraction, and
// only min/max reductions, which are order-insensitive).  Backends are
// therefore bitwise-equivalent, the equivalence tests assert exact equality,
// and backend selection can never perturb a filtration value or a landscape.
struct Ops {
    // out[j] = sum_d (q[d] - coords[d*n + j])^2
    void (*sq_dist_batch)(const double* q, const double* coords, std::size_t n, std::size_t dim, double* out);
    // min_j sum_d (q[d] - coords[d*n + j])^2   (n >= 1)
    double (*min_sq_dist)(const double* q, const double* coords, std::size_t n, std::size_t dim);
    // max_i |a[i] - b[i]|   (0 for n == 0)
    double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
    // acc[i] += x[i]
    void (*add_assign)(double* acc, const double* x, std::size_t n);
    // x[i] *= s
    void (*scale)(double* x, std::size_t n, double s);
    // row[g] = max(row[g], max(0, min(t_g - birth, death - t_g))), t_g = g*dt + t0
    void (*tent_max)(double* row, std::size_t g_count, double t0, double dt, double birth, double death);
    const char* name;
};

enum class Backend { scalar, avx2 };

const Ops& scalar_ops();

// Backend in use; resolved once per process: TDASUB_KERNELS env var
// ("scalar" / "avx2" / "auto") if set, otherwise the widest ISA the CPU
// supports among the compiled backends.
const Ops& active();
Backend active_backend();
std::string active_name();

// Test/CLI hook.  Throws Error("kernel-backend", ...) if the requested
// backend is not available on this machine/build.
void force_backend(Backend backend);
void force_backend(const std::string& name);

bool avx2_available();

}  // namespace tda::kernels
