#include "neb/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "neb/common.hpp"

namespace neb::kernels {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace detail

namespace {

struct Dispatch {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
};

constexpr Dispatch kScalar{detail::dot_scalar, detail::axpy_scalar};
constexpr Dispatch kAvx2{detail::dot_avx2, detail::axpy_avx2};

Backend pick_initial_backend() {
    const char* env = std::getenv("NEB_KERNELS");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Backend::Avx2;
        if (std::strcmp(env, "avx2") == 0) return Backend::Scalar;  // unsupported, fall back
    }
    return avx2_supported() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<const Dispatch*> g_dispatch{nullptr};
std::atomic<Backend> g_backend{Backend::Scalar};

const Dispatch* dispatch() {
    const Dispatch* d = g_dispatch.load(std::memory_order_acquire);
    if (d == nullptr) {
        Backend b = pick_initial_backend();
        d = (b == Backend::Avx2) ? &kAvx2 : &kScalar;
        g_backend.store(b, std::memory_order_release);
        g_dispatch.store(d, std::memory_order_release);
    }
    return d;
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend backend() {
    dispatch();
    return g_backend.load(std::memory_order_acquire);
}

void set_backend(Backend b) {
    if (b == Backend::Avx2 && !avx2_supported())
        throw ConfigError("kernels: AVX2 backend requested but not supported by this CPU");
    g_backend.store(b, std::memory_order_release);
    g_dispatch.store(b == Backend::Avx2 ? &kAvx2 : &kScalar, std::memory_order_release);
}

const char* backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

double dot(const double* a, const double* b, std::size_t n) { return dispatch()->dot(a, b, n); }

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    dispatch()->axpy(alpha, x, y, n);
}

void matvec_acc(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
    const Dispatch* d = dispatch();
    for (std::size_t r = 0; r < rows; ++r) y[r] += d->dot(w + r * cols, x, cols);
}

void matvec_t_acc(const double* w, std::size_t rows, std::size_t cols, const double* g, double* y) {
    const Dispatch* d = dispatch();
    for (std::size_t r = 0; r < rows; ++r) d->axpy(g[r], w + r * cols, y, cols);
}

void outer_acc(double* w, std::size_t rows, std::size_t cols, const double* g, const double* x) {
    const Dispatch* d = dispatch();
    for (std::size_t r = 0; r < rows; ++r) d->axpy(g[r], x, w + r * cols, cols);
}

}  // namespace neb::kernels
