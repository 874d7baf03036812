#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "toricma/polygon.hpp"
#include "toricma/types.hpp"

namespace toricma {

/// Scalar field with first and second derivatives on a tensor grid clipped to a polygon.
struct ScalarField2D {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<unsigned char> valid;
    std::vector<double> value;
    std::vector<Vec2> grad;
    std::vector<Sym2> hess;

    std::size_t nx() const { return xs.size(); }
    std::size_t ny() const { return ys.size(); }
    std::size_t index(std::size_t i, std::size_t j) const { return j * xs.size() + i; }
    Point node(std::size_t i, std::size_t j) const { return {xs[i], ys[j]}; }

    void resize(std::vector<double> x, std::vector<double> y);

    using Sampler = std::function<void(Point, double&, Vec2&, Sym2&)>;
    /// Samples at every grid node accepted by keep.
    static ScalarField2D sample(std::vector<double> x, std::vector<double> y, const std::function<bool(Point)>& keep,
                                const Sampler& sampler);
};

/// Parts of ||f|| + ||rho Df|| + ||rho^2 D^2 f||, each a C^{0,alpha} norm (sup plus seminorm).
struct WeightedNormReport {
    double c0_alpha = 0.0;
    double weighted_grad = 0.0;
    double weighted_hess = 0.0;
    double total = 0.0;

    double sup_f = 0.0;
    double semi_f = 0.0;
    double sup_grad = 0.0;
    double semi_grad = 0.0;
    double sup_hess = 0.0;
    double semi_hess = 0.0;
    std::size_t pairs = 0;
};

struct HolderEstimatorOptions {
    /// Neighbour offsets per level run up to this many subgrid steps.
    int band = 4;
    std::size_t min_pairs = 16;
    /// Skip the weighted derivative parts (plain C^{0,alpha} of f only).
    bool value_only = false;
};

/// Dyadic band estimator: pairs at subgrid offsets 1..band on grids of stride 2^k, down to a grid
/// small enough that the band covers every pair. Vector parts use the Euclidean norm, matrix
/// parts the Frobenius norm. rho vanishes on boundary nodes, where the weighted parts are zero.
WeightedNormReport weighted_holder_norm(const Polygon& polygon, const ScalarField2D& f, double alpha,
                                        const HolderEstimatorOptions& options = {});

/// Same quantities by enumeration of every valid pair; quadratic cost.
WeightedNormReport weighted_holder_norm_all_pairs(const Polygon& polygon, const ScalarField2D& f, double alpha);

/// ||f||_{C^{0,alpha}} + ||Df||_{C^{0,alpha}} by the band estimator.
double c1_alpha_norm(const ScalarField2D& f, double alpha, const HolderEstimatorOptions& options = {});

}  // namespace toricma
