// AVX2/FMA variants of the double-precision inner loops. This translation
// unit is compiled with -mavx2 -mfma; it is only ever entered through the
// runtime dispatch table after a CPUID check.

#include "neb/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace neb::kernels::detail {

double dot_avx2(const double* a, const double* b, std::size_t n) {
    std::size_t body = (n / 8) * 8;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i < body; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    __m256d acc = _mm256_add_pd(acc0, acc1);
    __m128d lo = _mm256_castpd256_pd128(acc);
    __m128d hi = _mm256_extractf128_pd(acc, 1);
    __m128d sum2 = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(sum2, sum2);
    double total = _mm_cvtsd_f64(_mm_add_sd(sum2, swapped));
    for (; i < n; ++i) total += a[i] * b[i];
    return total;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    std::size_t body = (n / 4) * 4;
    __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i < body; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace neb::kernels::detail

#else

namespace neb::kernels::detail {

// Non-x86 build: route through the scalar reference; dispatch never selects
// these on such platforms anyway.
double dot_avx2(const double* a, const double* b, std::size_t n) { return dot_scalar(a, b, n); }
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    axpy_scalar(alpha, x, y, n);
}

}  // namespace neb::kernels::detail

#endif
