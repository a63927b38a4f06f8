// AVX2 kernels. Compiled with -mavx2 -mfma; callers must gate on
// backend_available(Backend::Avx2) before dispatching here.
//
// Floats are widened to double lanes before accumulation. float x float
// products are exact in double, so the only difference from the scalar
// reference is summation order: four lane partials per accumulator plus a
// horizontal reduction at the end.

#include "weave/kernels.hpp"

#if defined(WEAVE_HAVE_AVX2_BUILD)

#include <immintrin.h>

namespace weave::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot(const float* a, const float* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 va = _mm256_loadu_ps(a + i);
        __m256 vb = _mm256_loadu_ps(b + i);
        acc0 = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(va)),
                               _mm256_cvtps_pd(_mm256_castps256_ps128(vb)), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(va, 1)),
                               _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1)), acc1);
    }
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return sum;
}

double squared_norm(const float* v, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 x = _mm256_loadu_ps(v + i);
        __m256d lo = _mm256_cvtps_pd(_mm256_castps256_ps128(x));
        __m256d hi = _mm256_cvtps_pd(_mm256_extractf128_ps(x, 1));
        acc0 = _mm256_fmadd_pd(lo, lo, acc0);
        acc1 = _mm256_fmadd_pd(hi, hi, acc1);
    }
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        sum += static_cast<double>(v[i]) * static_cast<double>(v[i]);
    }
    return sum;
}

double squared_l2_distance(const float* a, const float* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 va = _mm256_loadu_ps(a + i);
        __m256 vb = _mm256_loadu_ps(b + i);
        __m256d dlo = _mm256_sub_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(va)),
                                    _mm256_cvtps_pd(_mm256_castps256_ps128(vb)));
        __m256d dhi = _mm256_sub_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(va, 1)),
                                    _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1)));
        acc0 = _mm256_fmadd_pd(dlo, dlo, acc0);
        acc1 = _mm256_fmadd_pd(dhi, dhi, acc1);
    }
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sum += d * d;
    }
    return sum;
}

}  // namespace weave::kernels::avx2

#endif  // WEAVE_HAVE_AVX2_BUILD
