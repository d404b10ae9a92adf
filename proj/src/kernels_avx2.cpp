#include "tda/kernels.hpp"

#include <immintrin.h>

#include <cmath>

// Runtime-dispatched AVX2 backend.  This translation unit is compiled with
// -mavx2 and must only be entered after the cpuid check in the dispatcher.
// Deliberately no FMA: each lane performs multiply-then-add in the same
// order as the scalar reference so results are bitwise identical.

namespace tda::kernels {
namespace {

inline double hmin(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_min_pd(lo, hi);
    __m128d s = _mm_unpackhi_pd(m, m);
    return _mm_cvtsd_f64(_mm_min_sd(m, s));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d m = _mm_max_pd(lo, hi);
    __m128d s = _mm_unpackhi_pd(m, m);
    return _mm_cvtsd_f64(_mm_max_sd(m, s));
}

void sq_dist_batch_avx2(const double* q, const double* coords, std::size_t n, std::size_t dim, double* out) {
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t d = 0; d < dim; ++d) {
            __m256d qd = _mm256_set1_pd(q[d]);
            __m256d c = _mm256_loadu_pd(coords + d * n + j);
            __m256d diff = _mm256_sub_pd(qd, c);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
        }
        _mm256_storeu_pd(out + j, acc);
    }
    for (; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            double diff = q[d] - coords[d * n + j];
            acc += diff * diff;
        }
        out[j] = acc;
    }
}

double min_sq_dist_avx2(const double* q, const double* coords, std::size_t n, std::size_t dim) {
    double best = HUGE_VAL;
    std::size_t j = 0;
    if (n >= 4) {
        __m256d vbest = _mm256_set1_pd(HUGE_VAL);
        for (; j + 4 <= n; j += 4) {
            __m256d acc = _mm256_setzero_pd();
            for (std::size_t d = 0; d < dim; ++d) {
                __m256d qd = _mm256_set1_pd(q[d]);
                __m256d c = _mm256_loadu_pd(coords + d * n + j);
                __m256d diff = _mm256_sub_pd(qd, c);
                acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
            }
            vbest = _mm256_min_pd(vbest, acc);
        }
        best = hmin(vbest);
    }
    for (; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            double diff = q[d] - coords[d * n + j];
            acc += diff * diff;
        }
        if (acc < best) best = acc;
    }
    return best;
}

double max_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    double best = 0.0;
    std::size_t i = 0;
    if (n >= 4) {
        __m256d vbest = _mm256_setzero_pd();
        for (; i + 4 <= n; i += 4) {
            __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
            vbest = _mm256_max_pd(vbest, _mm256_andnot_pd(sign_mask, diff));
        }
        best = hmax(vbest);
    }
    for (; i < n; ++i) {
        double diff = std::fabs(a[i] - b[i]);
        if (diff > best) best = diff;
    }
    return best;
}

void add_assign_avx2(double* acc, const double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) acc[i] += x[i];
}

void scale_avx2(double* x, std::size_t n, double s) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vs));
    }
    for (; i < n; ++i) x[i] *= s;
}

void tent_max_avx2(double* row, std::size_t g_count, double t0, double dt, double birth, double death) {
    const __m256d vdt = _mm256_set1_pd(dt);
    const __m256d vt0 = _mm256_set1_pd(t0);
    const __m256d vb = _mm256_set1_pd(birth);
    const __m256d vd = _mm256_set1_pd(death);
    const __m256d vzero = _mm256_setzero_pd();
    const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
    std::size_t g = 0;
    for (; g + 4 <= g_count; g += 4) {
        __m256d gv = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(g)), lane);
        __m256d t = _mm256_add_pd(_mm256_mul_pd(gv, vdt), vt0);
        __m256d up = _mm256_sub_pd(t, vb);
        __m256d down = _mm256_sub_pd(vd, t);
        __m256d v = _mm256_max_pd(_mm256_min_pd(up, down), vzero);
        _mm256_storeu_pd(row + g, _mm256_max_pd(_mm256_loadu_pd(row + g), v));
    }
    for (; g < g_count; ++g) {
        double t = static_cast<double>(g) * dt + t0;
        double up = t - birth;
        double down = death - t;
        double v = up < down ? up : down;
        if (v < 0.0) v = 0.0;
        if (v > row[g]) row[g] = v;
    }
}

}  // namespace

const Ops& avx2_ops_impl() {
    static const Ops ops = {
        &sq_dist_batch_avx2, &min_sq_dist_avx2, &max_abs_diff_avx2,
        &add_assign_avx2,    &scale_avx2,       &tent_max_avx2,
        "avx2",
    };
    return ops;
}

}  // namespace tda::kernels
