#include "toricma/weighted_norm.hpp"

#include <algorithm>
#include <cmath>

#include "toricma/error.hpp"

namespace toricma {

void ScalarField2D::resize(std::vector<double> x, std::vector<double> y) {
    xs = std::move(x);
    ys = std::move(y);
    const std::size_t n = xs.size() * ys.size();
    valid.assign(n, 0);
    value.assign(n, 0.0);
    grad.assign(n, Vec2{});
    hess.assign(n, Sym2{});
}

ScalarField2D ScalarField2D::sample(std::vector<double> x, std::vector<double> y,
                                    const std::function<bool(Point)>& keep, const Sampler& sampler) {
    ScalarField2D f;
    f.resize(std::move(x), std::move(y));
    for (std::size_t j = 0; j < f.ny(); ++j)
        for (std::size_t i = 0; i < f.nx(); ++i) {
            const Point p = f.node(i, j);
            if (!keep(p)) continue;
            const std::size_t k = f.index(i, j);
            f.valid[k] = 1;
            sampler(p, f.value[k], f.grad[k], f.hess[k]);
        }
    return f;
}

namespace {

double frob(const Sym2& m) { return std::sqrt(m.xx * m.xx + 2.0 * m.xy * m.xy + m.yy * m.yy); }

/// Per-node weighted quantities, precomputed once.
struct Weighted {
    std::vector<double> f;
    std::vector<Vec2> g;
    std::vector<Sym2> h;
};

Weighted weigh(const Polygon& polygon, const ScalarField2D& f, bool weighted) {
    Weighted w;
    const std::size_t n = f.value.size();
    w.f = f.value;
    w.g.assign(n, Vec2{});
    w.h.assign(n, Sym2{});
    for (std::size_t j = 0; j < f.ny(); ++j)
        for (std::size_t i = 0; i < f.nx(); ++i) {
            const std::size_t k = f.index(i, j);
            if (!f.valid[k]) continue;
            const Point p = f.node(i, j);
            const double m = polygon.min_l(p);
            const double rho = weighted ? (m > 0.0 ? std::sqrt(polygon.product_l(p)) : 0.0) : 1.0;
            if (rho > 0.0) {
                w.g[k] = f.grad[k] * rho;
                w.h[k] = f.hess[k] * (rho * rho);
            }
        }
    return w;
}

struct Accumulator {
    double alpha;
    bool derivatives;
    double semi_f = 0.0;
    double semi_g = 0.0;
    double semi_h = 0.0;
    std::size_t pairs = 0;

    void pair(const Weighted& w, std::size_t a, std::size_t b, double dist) {
        const double inv = 1.0 / std::pow(dist, alpha);
        semi_f = std::max(semi_f, std::abs(w.f[a] - w.f[b]) * inv);
        if (derivatives) {
            semi_g = std::max(semi_g, norm(w.g[a] - w.g[b]) * inv);
            semi_h = std::max(semi_h, frob(w.h[a] - w.h[b]) * inv);
        }
        ++pairs;
    }
};

std::vector<std::size_t> subgrid(std::size_t n, std::size_t stride) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; i += stride) idx.push_back(i);
    if (idx.back() != n - 1) idx.push_back(n - 1);
    return idx;
}

WeightedNormReport finish(const ScalarField2D& f, const Weighted& w, const Accumulator& acc, bool derivatives) {
    WeightedNormReport r;
    for (std::size_t k = 0; k < f.value.size(); ++k) {
        if (!f.valid[k]) continue;
        r.sup_f = std::max(r.sup_f, std::abs(w.f[k]));
        if (derivatives) {
            r.sup_grad = std::max(r.sup_grad, norm(w.g[k]));
            r.sup_hess = std::max(r.sup_hess, frob(w.h[k]));
        }
    }
    r.semi_f = acc.semi_f;
    r.semi_grad = acc.semi_g;
    r.semi_hess = acc.semi_h;
    r.c0_alpha = r.sup_f + r.semi_f;
    r.weighted_grad = r.sup_grad + r.semi_grad;
    r.weighted_hess = r.sup_hess + r.semi_hess;
    r.total = r.c0_alpha + r.weighted_grad + r.weighted_hess;
    r.pairs = acc.pairs;
    return r;
}

WeightedNormReport band_estimate(const ScalarField2D& f, const Weighted& w, double alpha,
                                 const HolderEstimatorOptions& options, bool derivatives) {
    if (f.nx() < 2 || f.ny() < 2) throw Error(ErrorKind::MeshTooCoarse, "grid needs at least two nodes per axis");
    Accumulator acc{alpha, derivatives};
    const int band = std::max(options.band, 1);
    for (std::size_t stride = 1;; stride *= 2) {
        const auto I = subgrid(f.nx(), stride);
        const auto J = subgrid(f.ny(), stride);
        for (std::size_t b = 0; b < J.size(); ++b)
            for (std::size_t a = 0; a < I.size(); ++a) {
                const std::size_t k = f.index(I[a], J[b]);
                if (!f.valid[k]) continue;
                for (int db = 0; db <= band; ++db)
                    for (int da = -band; da <= band; ++da) {
                        if (db == 0 && da <= 0) continue;
                        const long aa = static_cast<long>(a) + da;
                        const long bb = static_cast<long>(b) + db;
                        if (aa < 0 || aa >= static_cast<long>(I.size()) || bb >= static_cast<long>(J.size())) continue;
                        const std::size_t m = f.index(I[aa], J[bb]);
                        if (!f.valid[m]) continue;
                        acc.pair(w, k, m, norm(f.node(I[aa], J[bb]) - f.node(I[a], J[b])));
                    }
            }
        if (I.size() <= static_cast<std::size_t>(band) + 1 && J.size() <= static_cast<std::size_t>(band) + 1) break;
    }
    if (acc.pairs < options.min_pairs)
        throw Error(ErrorKind::MeshTooCoarse, "only " + std::to_string(acc.pairs) + " node pairs available");
    return finish(f, w, acc, derivatives);
}

}  // namespace

WeightedNormReport weighted_holder_norm(const Polygon& polygon, const ScalarField2D& f, double alpha,
                                        const HolderEstimatorOptions& options) {
    const Weighted w = weigh(polygon, f, true);
    return band_estimate(f, w, alpha, options, !options.value_only);
}

WeightedNormReport weighted_holder_norm_all_pairs(const Polygon& polygon, const ScalarField2D& f, double alpha) {
    const Weighted w = weigh(polygon, f, true);
    Accumulator acc{alpha, true};
    std::vector<std::size_t> nodes;
    for (std::size_t k = 0; k < f.value.size(); ++k)
        if (f.valid[k]) nodes.push_back(k);
    auto pos = [&](std::size_t k) { return f.node(k % f.nx(), k / f.nx()); };
    for (std::size_t a = 0; a < nodes.size(); ++a)
        for (std::size_t b = a + 1; b < nodes.size(); ++b)
            acc.pair(w, nodes[a], nodes[b], norm(pos(nodes[a]) - pos(nodes[b])));
    return finish(f, w, acc, true);
}

double c1_alpha_norm(const ScalarField2D& f, double alpha, const HolderEstimatorOptions& options) {
    // Reuse the estimator with unit weight: the gradient part becomes ||Df||.
    Weighted w;
    w.f = f.value;
    w.g = f.grad;
    w.h.assign(f.value.size(), Sym2{});
    const WeightedNormReport r = band_estimate(f, w, alpha, options, true);
    return r.c0_alpha + r.weighted_grad;
}

}  // namespace toricma
