#include <cmath>
#include <limits>

#include "toricma/kernels.hpp"

namespace toricma::kernels::scalar {

// Operation order here is the reference for the vector variants; keep them in step.

void ma_residual(const MaBatch& b, double* residual, double* min_eig) {
    for (std::size_t k = 0; k < b.n; ++k) {
        const double m11 = b.a11[k] + b.b11[k];
        const double m12 = b.a12[k] + b.b12[k];
        const double m22 = b.a22[k] + b.b22[k];
        const double det = m11 * m22 - m12 * m12;
        residual[k] = b.weight[k] * det - b.rhs[k];
        const double diff = m11 - m22;
        const double root = std::sqrt(diff * diff + 4.0 * (m12 * m12));
        const double tr = m11 + m22;
        const double lmax = 0.5 * (tr + root);
        // det / lmax avoids cancellation in the small eigenvalue; fall back when lmax is not positive.
        min_eig[k] = lmax > 0.0 ? det / lmax : 0.5 * (tr - root);
    }
}

void comparability(const double* a11, const double* a12, const double* a22, const double* b11, const double* b12,
                   const double* b22, std::size_t n, double* out) {
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double detA = a11[k] * a22[k] - a12[k] * a12[k];
        const double detB = b11[k] * b22[k] - b12[k] * b12[k];
        const double tr = ((a22[k] * b11[k] - 2.0 * (a12[k] * b12[k])) + a11[k] * b22[k]) / detA;
        const double det = detB / detA;
        double disc = tr * tr - 4.0 * det;
        disc = disc > 0.0 ? disc : 0.0;
        const double lmax = 0.5 * (tr + std::sqrt(disc));
        const double lmin = det / lmax;
        const double inv = 1.0 / lmin;
        const double c = lmax < inv ? inv : lmax;
        const bool spd = a11[k] > 0.0 && detA > 0.0 && b11[k] > 0.0 && detB > 0.0;
        out[k] = spd ? c : inf;
    }
}

}  // namespace toricma::kernels::scalar
