#pragma once

#include <cstddef>

namespace neb::kernels {

// Double-precision inner loops behind the network code. Scalar reference
// implementations always exist; an AVX2/FMA variant is selected at runtime
// when the CPU supports it. Set NEB_KERNELS=scalar (or avx2) in the
// environment, or call set_backend, to pin a backend explicitly.
enum class Backend { Scalar, Avx2 };

Backend backend();
void set_backend(Backend b);  // throws neb::ConfigError if unsupported
bool avx2_supported();
const char* backend_name(Backend b);

double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);  // y += alpha * x

// Composite operations on row-major matrices; these loop over dot/axpy so
// both backends share one definition.
void matvec_acc(const double* w, std::size_t rows, std::size_t cols, const double* x,
                double* y);  // y[r] += w[r,:] . x
void matvec_t_acc(const double* w, std::size_t rows, std::size_t cols, const double* g,
                  double* y);  // y += w^T g
void outer_acc(double* w, std::size_t rows, std::size_t cols, const double* g,
               const double* x);  // w[r,:] += g[r] * x

namespace detail {
double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
}  // namespace detail

}  // namespace neb::kernels
