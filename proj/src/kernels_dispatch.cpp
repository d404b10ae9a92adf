#include "tda/kernels.hpp"

#include <atomic>
#include <cstdlib>

#include "tda/common.hpp"

namespace tda::kernels {

#if defined(TDASUB_HAVE_AVX2_BACKEND)
const Ops& avx2_ops_impl();  // defined in kernels_avx2.cpp, compiled with -mavx2
#endif

bool avx2_available() {
#if defined(TDASUB_HAVE_AVX2_BACKEND) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

namespace {

std::atomic<const Ops*> g_active{nullptr};

const Ops* resolve() {
    const char* env = std::getenv("TDASUB_KERNELS");
    std::string want = env ? env : "auto";
    if (want == "scalar") return &scalar_ops();
#if defined(TDASUB_HAVE_AVX2_BACKEND)
    if (want == "avx2") {
        require(avx2_available(), "kernel-backend", "avx2 requested but this CPU does not support it");
        return &avx2_ops_impl();
    }
    if (want == "auto") return avx2_available() ? &avx2_ops_impl() : &scalar_ops();
#else
    if (want == "avx2") fail("kernel-backend", "avx2 backend was not compiled in");
    if (want == "auto") return &scalar_ops();
#endif
    fail("kernel-backend", "unknown TDASUB_KERNELS value '" + want + "' (use auto, scalar, or avx2)");
}

}  // namespace

const Ops& active() {
    const Ops* ops = g_active.load(std::memory_order_acquire);
    if (!ops) {
        ops = resolve();
        g_active.store(ops, std::memory_order_release);
    }
    return *ops;
}

Backend active_backend() {
    return &active() == &scalar_ops() ? Backend::scalar : Backend::avx2;
}

std::string active_name() { return active().name; }

void force_backend(Backend backend) {
    if (backend == Backend::scalar) {
        g_active.store(&scalar_ops(), std::memory_order_release);
        return;
    }
#if defined(TDASUB_HAVE_AVX2_BACKEND)
    require(avx2_available(), "kernel-backend", "avx2 requested but this CPU does not support it");
    g_active.store(&avx2_ops_impl(), std::memory_order_release);
#else
    fail("kernel-backend", "avx2 backend was not compiled in");
#endif
}

void force_backend(const std::string& name) {
    if (name == "scalar") {
        force_backend(Backend::scalar);
    } else if (name == "avx2") {
        force_backend(Backend::avx2);
    } else if (name == "auto") {
        g_active.store(nullptr, std::memory_order_release);
        active();
    } else {
        fail("kernel-backend", "unknown kernel backend '" + name + "' (use auto, scalar, or avx2)");
    }
}

}  // namespace tda::kernels
