#pragma once

#include <cstddef>
#include <string_view>

namespace toricma::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);
/// Best instruction set supported by this CPU and build.
Isa detected_isa();
/// Instruction set used by the dispatching entry points.
Isa active_isa();
/// Forces a variant; requests the CPU cannot run fall back to Scalar. Returns the variant in effect.
Isa set_isa(Isa isa);

/// Structure-of-arrays batch of node Hessians M = A + B with weights and right-hand sides.
struct MaBatch {
    const double* a11;
    const double* a12;
    const double* a22;
    const double* b11;
    const double* b12;
    const double* b22;
    const double* weight;
    const double* rhs;
    std::size_t n;
};

/// residual = weight det(A + B) - rhs; min_eig = smallest eigenvalue of A + B (non-positive when not SPD).
void ma_residual(const MaBatch& batch, double* residual, double* min_eig);

/// Comparability constant max(lambda_max, 1/lambda_min) of the pencil (A, B): eigenvalues of
/// A^{-1/2} B A^{-1/2}. Infinity when A or B is not positive definite.
void comparability(const double* a11, const double* a12, const double* a22, const double* b11, const double* b12,
                   const double* b22, std::size_t n, double* out);

namespace scalar {
void ma_residual(const MaBatch& batch, double* residual, double* min_eig);
void comparability(const double* a11, const double* a12, const double* a22, const double* b11, const double* b12,
                   const double* b22, std::size_t n, double* out);
}  // namespace scalar

namespace avx2 {
void ma_residual(const MaBatch& batch, double* residual, double* min_eig);
void comparability(const double* a11, const double* a12, const double* a22, const double* b11, const double* b12,
                   const double* b22, std::size_t n, double* out);
}  // namespace avx2

namespace neon {
void ma_residual(const MaBatch& batch, double* residual, double* min_eig);
void comparability(const double* a11, const double* a12, const double* a22, const double* b11, const double* b12,
                   const double* b22, std::size_t n, double* out);
}  // namespace neon

}  // namespace toricma::kernels
