#include "toricma/rhs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "toricma/error.hpp"

namespace toricma {

RhsField::RhsField(Evaluator h, double a, double A, double alpha, double holder_seminorm, bool smooth)
    : h_(std::move(h)), a_(a), A_(A), alpha_(alpha), seminorm_(holder_seminorm), smooth_(smooth) {
    if (!(a > 0.0)) throw Error(ErrorKind::NonPositiveH, "lower bound a must be positive");
    if (!(A >= a)) throw Error(ErrorKind::ConfigError, "upper bound A must be at least a");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::ConfigError, "Holder exponent must lie in (0, 1)");
    if (!(holder_seminorm >= 0.0)) throw Error(ErrorKind::ConfigError, "Holder seminorm must be nonnegative");
}

RhsField RhsField::constant(double c, double alpha) {
    return RhsField([c](Point) { return c; }, c, c, alpha, 0.0, true);
}

RhsField RhsField::with_holder_seminorm(double seminorm) const {
    return RhsField(h_, a_, A_, alpha_, seminorm, smooth_);
}

RhsField RhsField::with_evaluator(Evaluator h, bool smooth) const {
    return RhsField(std::move(h), a_, A_, alpha_, seminorm_, smooth);
}

namespace {
std::vector<Point> closure_samples(const Polygon& polygon, int n) {
    const Point lo = polygon.lower_corner();
    const Point hi = polygon.upper_corner();
    const double slack = 1e-12 * polygon.diameter();
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Point x{lo.x + (hi.x - lo.x) * i / (n - 1), lo.y + (hi.y - lo.y) * j / (n - 1)};
            if (polygon.contains(x, slack)) pts.push_back(x);
        }
    for (const Point& v : polygon.vertices()) pts.push_back(v);
    return pts;
}
}  // namespace

double estimate_holder_seminorm(const Polygon& polygon, const RhsField::Evaluator& f, double alpha, int n) {
    const auto pts = closure_samples(polygon, n);
    std::vector<double> vals(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) vals[k] = f(pts[k]);
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double d = norm(pts[i] - pts[j]);
            if (d <= 0.0) continue;
            best = std::max(best, std::abs(vals[i] - vals[j]) / std::pow(d, alpha));
        }
    return best;
}

SampledRange sample_range(const Polygon& polygon, const RhsField::Evaluator& f, int n) {
    SampledRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const Point& x : closure_samples(polygon, n)) {
        const double v = f(x);
        if (std::isnan(v)) throw Error(ErrorKind::ConfigError, "right-hand side evaluates to NaN");
        r.min = std::min(r.min, v);
        r.max = std::max(r.max, v);
    }
    return r;
}

void validate_rhs(const Polygon& polygon, const RhsField& rhs, int n) {
    const SampledRange r = sample_range(polygon, rhs.evaluator(), n);
    std::ostringstream msg;
    if (!(r.min > 0.0)) {
        msg << "sampled minimum of H is " << r.min;
        throw Error(ErrorKind::NonPositiveH, msg.str());
    }
    const double slack = 1e-12 * std::max(1.0, rhs.A());
    if (r.min < rhs.a() - slack || r.max > rhs.A() + slack) {
        msg << "sampled range [" << r.min << ", " << r.max << "] leaves the declared bounds [" << rhs.a() << ", "
            << rhs.A() << "]";
        throw Error(ErrorKind::ConfigError, msg.str());
    }
}

}  // namespace toricma
