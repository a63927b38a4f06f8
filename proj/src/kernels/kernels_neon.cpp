// AArch64 NEON kernels. Same widening discipline as the AVX2 variant: floats
// are converted to double lanes before accumulation, two accumulators per
// loop, horizontal reduction at the end.

#include "weave/kernels.hpp"

#if defined(WEAVE_HAVE_NEON_BUILD)

#include <arm_neon.h>

namespace weave::kernels::neon {

double dot(const float* a, const float* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t va = vld1q_f32(a + i);
        float32x4_t vb = vld1q_f32(b + i);
        acc0 = vfmaq_f64(acc0, vcvt_f64_f32(vget_low_f32(va)), vcvt_f64_f32(vget_low_f32(vb)));
        acc1 = vfmaq_f64(acc1, vcvt_high_f64_f32(va), vcvt_high_f64_f32(vb));
    }
    double sum = (vgetq_lane_f64(acc0, 0) + vgetq_lane_f64(acc0, 1)) +
                 (vgetq_lane_f64(acc1, 0) + vgetq_lane_f64(acc1, 1));
    for (; i < n; ++i) {
        sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return sum;
}

double squared_norm(const float* v, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t x = vld1q_f32(v + i);
        float64x2_t lo = vcvt_f64_f32(vget_low_f32(x));
        float64x2_t hi = vcvt_high_f64_f32(x);
        acc0 = vfmaq_f64(acc0, lo, lo);
        acc1 = vfmaq_f64(acc1, hi, hi);
    }
    double sum = (vgetq_lane_f64(acc0, 0) + vgetq_lane_f64(acc0, 1)) +
                 (vgetq_lane_f64(acc1, 0) + vgetq_lane_f64(acc1, 1));
    for (; i < n; ++i) {
        sum += static_cast<double>(v[i]) * static_cast<double>(v[i]);
    }
    return sum;
}

double squared_l2_distance(const float* a, const float* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t va = vld1q_f32(a + i);
        float32x4_t vb = vld1q_f32(b + i);
        float64x2_t dlo = vsubq_f64(vcvt_f64_f32(vget_low_f32(va)), vcvt_f64_f32(vget_low_f32(vb)));
        float64x2_t dhi = vsubq_f64(vcvt_high_f64_f32(va), vcvt_high_f64_f32(vb));
        acc0 = vfmaq_f64(acc0, dlo, dlo);
        acc1 = vfmaq_f64(acc1, dhi, dhi);
    }
    double sum = (vgetq_lane_f64(acc0, 0) + vgetq_lane_f64(acc0, 1)) +
                 (vgetq_lane_f64(acc1, 0) + vgetq_lane_f64(acc1, 1));
    for (; i < n; ++i) {
        double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sum += d * d;
    }
    return sum;
}

}  // namespace weave::kernels::neon

#endif  // WEAVE_HAVE_NEON_BUILD
