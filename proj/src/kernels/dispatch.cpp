#include <atomic>
#include <cstdlib>
#include <string>

#include "toricma/kernels.hpp"

namespace toricma::kernels {

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "scalar";
}

Isa detected_isa() {
#if defined(__x86_64__) || defined(_M_X64)
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#elif defined(__aarch64__) && defined(__ARM_NEON)
    return Isa::Neon;
#endif
    return Isa::Scalar;
}

namespace {

Isa initial_isa() {
    const Isa best = detected_isa();
    if (const char* env = std::getenv("TORICMA_ISA"); env != nullptr && std::string(env) == "scalar")
        return Isa::Scalar;
    return best;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

Isa set_isa(Isa isa) {
    const Isa best = detected_isa();
    const Isa chosen = (isa == Isa::Scalar || isa == best) ? isa : Isa::Scalar;
    current().store(chosen, std::memory_order_relaxed);
    return chosen;
}

void ma_residual(const MaBatch& batch, double* residual, double* min_eig) {
    switch (active_isa()) {
        case Isa::Avx2: return avx2::ma_residual(batch, residual, min_eig);
        case Isa::Neon: return neon::ma_residual(batch, residual, min_eig);
        case Isa::Scalar: break;
    }
    scalar::ma_residual(batch, residual, min_eig);
}

void comparability(const double* a11, const double* a12, const double* a22, const double* b11, const double* b12,
                   const double* b22, std::size_t n, double* out) {
    switch (active_isa()) {
        case Isa::Avx2: return avx2::comparability(a11, a12, a22, b11, b12, b22, n, out);
        case Isa::Neon: return neon::comparability(a11, a12, a22, b11, b12, b22, n, out);
        case Isa::Scalar: break;
    }
    scalar::comparability(a11, a12, a22, b11, b12, b22, n, out);
}

}  // namespace toricma::kernels
