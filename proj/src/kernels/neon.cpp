#include "toricma/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

#include <limits>

namespace toricma::kernels::neon {

namespace {
constexpr std::size_t W = 2;
}

void ma_residual(const MaBatch& b, double* residual, double* min_eig) {
    const float64x2_t half = vdupq_n_f64(0.5);
    const float64x2_t four = vdupq_n_f64(4.0);
    const float64x2_t zero = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + W <= b.n; k += W) {
        const float64x2_t m11 = vaddq_f64(vld1q_f64(b.a11 + k), vld1q_f64(b.b11 + k));
        const float64x2_t m12 = vaddq_f64(vld1q_f64(b.a12 + k), vld1q_f64(b.b12 + k));
        const float64x2_t m22 = vaddq_f64(vld1q_f64(b.a22 + k), vld1q_f64(b.b22 + k));
        const float64x2_t m12sq = vmulq_f64(m12, m12);
        const float64x2_t det = vsubq_f64(vmulq_f64(m11, m22), m12sq);
        vst1q_f64(residual + k, vsubq_f64(vmulq_f64(vld1q_f64(b.weight + k), det), vld1q_f64(b.rhs + k)));
        const float64x2_t diff = vsubq_f64(m11, m22);
        const float64x2_t root = vsqrtq_f64(vaddq_f64(vmulq_f64(diff, diff), vmulq_f64(four, m12sq)));
        const float64x2_t tr = vaddq_f64(m11, m22);
        const float64x2_t lmax = vmulq_f64(half, vaddq_f64(tr, root));
        const float64x2_t via_det = vdivq_f64(det, lmax);
        const float64x2_t via_tr = vmulq_f64(half, vsubq_f64(tr, root));
        vst1q_f64(min_eig + k, vbslq_f64(vcgtq_f64(lmax, zero), via_det, via_tr));
    }
    if (k < b.n) {
        MaBatch tail = b;
        tail.a11 += k; tail.a12 += k; tail.a22 += k;
        tail.b11 += k; tail.b12 += k; tail.b22 += k;
        tail.weight += k; tail.rhs += k;
        tail.n = b.n - k;
        scalar::ma_residual(tail, residual + k, min_eig + k);
    }
}

void comparability(const double* a11, const double* a12, const double* a22, const double* b11, const double* b12,
                   const double* b22, std::size_t n, double* out) {
    const float64x2_t half = vdupq_n_f64(0.5);
    const float64x2_t two = vdupq_n_f64(2.0);
    const float64x2_t four = vdupq_n_f64(4.0);
    const float64x2_t one = vdupq_n_f64(1.0);
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t inf = vdupq_n_f64(std::numeric_limits<double>::infinity());
    std::size_t k = 0;
    for (; k + W <= n; k += W) {
        const float64x2_t x11 = vld1q_f64(a11 + k), x12 = vld1q_f64(a12 + k), x22 = vld1q_f64(a22 + k);
        const float64x2_t y11 = vld1q_f64(b11 + k), y12 = vld1q_f64(b12 + k), y22 = vld1q_f64(b22 + k);
        const float64x2_t detA = vsubq_f64(vmulq_f64(x11, x22), vmulq_f64(x12, x12));
        const float64x2_t detB = vsubq_f64(vmulq_f64(y11, y22), vmulq_f64(y12, y12));
        const float64x2_t num =
            vaddq_f64(vsubq_f64(vmulq_f64(x22, y11), vmulq_f64(two, vmulq_f64(x12, y12))), vmulq_f64(x11, y22));
        const float64x2_t tr = vdivq_f64(num, detA);
        const float64x2_t det = vdivq_f64(detB, detA);
        float64x2_t disc = vsubq_f64(vmulq_f64(tr, tr), vmulq_f64(four, det));
        disc = vbslq_f64(vcgtq_f64(disc, zero), disc, zero);
        const float64x2_t lmax = vmulq_f64(half, vaddq_f64(tr, vsqrtq_f64(disc)));
        const float64x2_t lmin = vdivq_f64(det, lmax);
        const float64x2_t inv = vdivq_f64(one, lmin);
        const float64x2_t c = vbslq_f64(vcltq_f64(lmax, inv), inv, lmax);
        uint64x2_t spd = vandq_u64(vcgtq_f64(x11, zero), vcgtq_f64(detA, zero));
        spd = vandq_u64(spd, vandq_u64(vcgtq_f64(y11, zero), vcgtq_f64(detB, zero)));
        vst1q_f64(out + k, vbslq_f64(spd, c, inf));
    }
    if (k < n) scalar::comparability(a11 + k, a12 + k, a22 + k, b11 + k, b12 + k, b22 + k, n - k, out + k);
}

}  // namespace toricma::kernels::neon

#else

namespace toricma::kernels::neon {
void ma_residual(const MaBatch& b, double* residual, double* min_eig) { scalar::ma_residual(b, residual, min_eig); }
void comparability(const double* a11, const double* a12, const double* a22, const double* b11, const double* b12,
                   const double* b22, std::size_t n, double* out) {
    scalar::comparability(a11, a12, a22, b11, b12, b22, n, out);
}
}  // namespace toricma::kernels::neon

#endif
