#pragma once

#include <functional>

#include "toricma/polygon.hpp"
#include "toricma/types.hpp"

namespace toricma {

/// Right-hand side H with its bounds a <= H <= A and Holder data.
class RhsField {
public:
    using Evaluator = std::function<double(Point)>;

    RhsField(Evaluator h, double a, double A, double alpha, double holder_seminorm = 0.0, bool smooth = false);

    static RhsField constant(double c, double alpha = 0.5);

    double operator()(Point x) const { return h_(x); }
    const Evaluator& evaluator() const { return h_; }

    double a() const { return a_; }
    double A() const { return A_; }
    double alpha() const { return alpha_; }
    double holder_seminorm() const { return seminorm_; }
    /// sup|H| + [H]_alpha, with A standing in for the sup.
    double holder_norm() const { return A_ + seminorm_; }
    bool smooth() const { return smooth_; }

    RhsField with_holder_seminorm(double seminorm) const;
    RhsField with_evaluator(Evaluator h, bool smooth) const;

private:
    Evaluator h_;
    double a_;
    double A_;
    double alpha_;
    double seminorm_;
    bool smooth_;
};

/// Sampled [f]_alpha over an n x n grid of the closed polygon, all pairs.
double estimate_holder_seminorm(const Polygon& polygon, const RhsField::Evaluator& f, double alpha, int n = 40);

/// Sampled extrema of f over the closed polygon.
struct SampledRange {
    double min = 0.0;
    double max = 0.0;
};
SampledRange sample_range(const Polygon& polygon, const RhsField::Evaluator& f, int n = 64);

/// Rejects non-positive samples (NonPositiveH) and samples outside [a, A] (ConfigError).
void validate_rhs(const Polygon& polygon, const RhsField& rhs, int n = 64);

}  // namespace toricma
