#include "toricma/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#include <limits>

namespace toricma::kernels::avx2 {

namespace {
constexpr std::size_t W = 4;
}

void ma_residual(const MaBatch& b, double* residual, double* min_eig) {
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d four = _mm256_set1_pd(4.0);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + W <= b.n; k += W) {
        const __m256d m11 = _mm256_add_pd(_mm256_loadu_pd(b.a11 + k), _mm256_loadu_pd(b.b11 + k));
        const __m256d m12 = _mm256_add_pd(_mm256_loadu_pd(b.a12 + k), _mm256_loadu_pd(b.b12 + k));
        const __m256d m22 = _mm256_add_pd(_mm256_loadu_pd(b.a22 + k), _mm256_loadu_pd(b.b22 + k));
        const __m256d m12sq = _mm256_mul_pd(m12, m12);
        const __m256d det = _mm256_sub_pd(_mm256_mul_pd(m11, m22), m12sq);
        _mm256_storeu_pd(residual + k,
                         _mm256_sub_pd(_mm256_mul_pd(_mm256_loadu_pd(b.weight + k), det), _mm256_loadu_pd(b.rhs + k)));
        const __m256d diff = _mm256_sub_pd(m11, m22);
        const __m256d root = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(diff, diff), _mm256_mul_pd(four, m12sq)));
        const __m256d tr = _mm256_add_pd(m11, m22);
        const __m256d lmax = _mm256_mul_pd(half, _mm256_add_pd(tr, root));
        const __m256d via_det = _mm256_div_pd(det, lmax);
        const __m256d via_tr = _mm256_mul_pd(half, _mm256_sub_pd(tr, root));
        const __m256d positive = _mm256_cmp_pd(lmax, zero, _CMP_GT_OQ);
        _mm256_storeu_pd(min_eig + k, _mm256_blendv_pd(via_tr, via_det, positive));
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
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d four = _mm256_set1_pd(4.0);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t k = 0;
    for (; k + W <= n; k += W) {
        const __m256d x11 = _mm256_loadu_pd(a11 + k);
        const __m256d x12 = _mm256_loadu_pd(a12 + k);
        const __m256d x22 = _mm256_loadu_pd(a22 + k);
        const __m256d y11 = _mm256_loadu_pd(b11 + k);
        const __m256d y12 = _mm256_loadu_pd(b12 + k);
        const __m256d y22 = _mm256_loadu_pd(b22 + k);
        const __m256d detA = _mm256_sub_pd(_mm256_mul_pd(x11, x22), _mm256_mul_pd(x12, x12));
        const __m256d detB = _mm256_sub_pd(_mm256_mul_pd(y11, y22), _mm256_mul_pd(y12, y12));
        const __m256d num = _mm256_add_pd(
            _mm256_sub_pd(_mm256_mul_pd(x22, y11), _mm256_mul_pd(two, _mm256_mul_pd(x12, y12))), _mm256_mul_pd(x11, y22));
        const __m256d tr = _mm256_div_pd(num, detA);
        const __m256d det = _mm256_div_pd(detB, detA);
        __m256d disc = _mm256_sub_pd(_mm256_mul_pd(tr, tr), _mm256_mul_pd(four, det));
        disc = _mm256_blendv_pd(zero, disc, _mm256_cmp_pd(disc, zero, _CMP_GT_OQ));
        const __m256d lmax = _mm256_mul_pd(half, _mm256_add_pd(tr, _mm256_sqrt_pd(disc)));
        const __m256d lmin = _mm256_div_pd(det, lmax);
        const __m256d inv = _mm256_div_pd(one, lmin);
        const __m256d c = _mm256_blendv_pd(lmax, inv, _mm256_cmp_pd(lmax, inv, _CMP_LT_OQ));
        __m256d spd = _mm256_and_pd(_mm256_cmp_pd(x11, zero, _CMP_GT_OQ), _mm256_cmp_pd(detA, zero, _CMP_GT_OQ));
        spd = _mm256_and_pd(spd, _mm256_cmp_pd(y11, zero, _CMP_GT_OQ));
        spd = _mm256_and_pd(spd, _mm256_cmp_pd(detB, zero, _CMP_GT_OQ));
        _mm256_storeu_pd(out + k, _mm256_blendv_pd(inf, c, spd));
    }
    if (k < n) scalar::comparability(a11 + k, a12 + k, a22 + k, b11 + k, b12 + k, b22 + k, n - k, out + k);
}

}  // namespace toricma::kernels::avx2

#else

namespace toricma::kernels::avx2 {
void ma_residual(const MaBatch& b, double* residual, double* min_eig) { scalar::ma_residual(b, residual, min_eig); }
void comparability(const double* a11, const double* a12, const double* a22, const double* b11, const double* b12,
                   const double* b22, std::size_t n, double* out) {
    scalar::comparability(a11, a12, a22, b11, b12, b22, n, out);
}
}  // namespace toricma::kernels::avx2

#endif
