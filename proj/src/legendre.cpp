#include "toricma/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "toricma/error.hpp"
#include "toricma/mesh.hpp"

namespace toricma {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double y_log_y(double y) { return y > 0.0 ? y * std::log(y) : 0.0; }

}  // namespace

std::vector<double> graded_rows(double extent, int cells, double grading, double y_hi) {
    std::vector<double> rows;
    for (double y : graded_axis(0.0, extent, static_cast<std::size_t>(cells), grading))
        if (y > 0.0 && y <= y_hi * (1.0 + 1e-12)) rows.push_back(y);
    return rows;
}

LegendreStrip default_strip(const Polygon& polygon, std::size_t edge, int level, double grading, double y_hi) {
    double extent = 0.0;
    for (std::size_t i = 0; i < polygon.size(); ++i) extent = std::max(extent, polygon.l(edge, polygon.vertex(i)));
    const double L = polygon.edge_length(edge);
    LegendreStrip strip;
    strip.t_lo = 0.25 * L;
    strip.t_hi = 0.75 * L;
    strip.rows = graded_rows(extent, 1 << level, grading, std::min(y_hi, 0.5 * extent));
    strip.p_cells = std::max(8, (1 << level) / 2);
    return strip;
}

double LegendreField::recover(double tq, std::size_t row) const {
    const std::size_t n = np();
    const double* tr = t.data() + row * n;
    const double* ur = ustar.data() + row * n;
    if (tq < tr[0] || tq > tr[n - 1])
        throw Error(ErrorKind::PointOutsidePolygon, "probe outside the transformed row", row);
    std::size_t k = static_cast<std::size_t>(std::upper_bound(tr, tr + n, tq) - tr);
    k = std::clamp<std::size_t>(k, 1, n - 1) - 1;
    const double h = p[k + 1] - p[k];
    // Hermite cubic on [p_k, p_k+1] with slopes t_k, t_k+1; its derivative is monotone between them.
    auto cubic = [&](double s, double* dval) {
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double v = (2 * s3 - 3 * s2 + 1) * ur[k] + (s3 - 2 * s2 + s) * h * tr[k] + (-2 * s3 + 3 * s2) * ur[k + 1] +
                         (s3 - s2) * h * tr[k + 1];
        *dval = ((6 * s2 - 6 * s) * ur[k] + (3 * s2 - 4 * s + 1) * h * tr[k] + (-6 * s2 + 6 * s) * ur[k + 1] +
                 (3 * s2 - 2 * s) * h * tr[k + 1]) /
                h;
        return v;
    };
    double lo = 0.0;
    double hi = 1.0;
    double d = 0.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        cubic(mid, &d);
        (d < tq ? lo : hi) = mid;
    }
    const double s = 0.5 * (lo + hi);
    const double v = cubic(s, &d);
    return tq * (p[k] + s * h) - v;
}

LegendreField partial_legendre(const ConvexField& u, const ChartFrame& frame, const LegendreStrip& strip,
                               double singular) {
    if (strip.rows.size() < 3 || strip.p_cells < 2 || !(strip.t_hi > strip.t_lo))
        throw Error(ErrorKind::ConfigError, "strip needs three rows, two p-cells and t_lo < t_hi");
    auto ut = [&](double t, double y) { return frame.d1(u.gradient(frame.to_world(t, y))); };

    const std::size_t ny = strip.rows.size();
    double p_lo = -std::numeric_limits<double>::infinity();
    double p_hi = std::numeric_limits<double>::infinity();
    constexpr int scan = 64;
    for (std::size_t j = 0; j < ny; ++j) {
        const double y = strip.rows[j];
        double prev = ut(strip.t_lo, y);
        p_lo = std::max(p_lo, prev);
        for (int q = 1; q <= scan; ++q) {
            const double cur = ut(strip.t_lo + (strip.t_hi - strip.t_lo) * q / scan, y);
            if (!(cur > prev)) throw Error(ErrorKind::NonMonotoneSlice, "u_t is not increasing along a row", j);
            prev = cur;
        }
        p_hi = std::min(p_hi, prev);
    }
    if (!(p_hi > p_lo)) throw Error(ErrorKind::NonMonotoneSlice, "rows share no common p-range");

    LegendreField lf;
    lf.frame = frame;
    lf.strip = strip;
    lf.singular = singular;
    lf.y = strip.rows;
    const std::size_t np = static_cast<std::size_t>(strip.p_cells) + 1;
    lf.p.resize(np);
    for (std::size_t k = 0; k < np; ++k) lf.p[k] = p_lo + (p_hi - p_lo) * static_cast<double>(k) / (np - 1);
    lf.t.assign(ny * np, 0.0);
    lf.ustar.assign(ny * np, 0.0);
    for (std::size_t j = 0; j < ny; ++j) {
        const double y = lf.y[j];
        double lo = strip.t_lo;
        for (std::size_t k = 0; k < np; ++k) {
            // Targets increase with k, so the previous root brackets from below.
            double a = lo;
            double b = strip.t_hi;
            for (int it = 0; it < 64 && b - a > 0.0; ++it) {
                const double mid = 0.5 * (a + b);
                if (mid <= a || mid >= b) break;
                (ut(mid, y) < lf.p[k] ? a : b) = mid;
            }
            const double t = 0.5 * (a + b);
            lo = a;
            lf.t[j * np + k] = t;
            lf.ustar[j * np + k] = t * lf.p[k] - u.value(frame.to_world(t, y));
        }
    }
    return lf;
}

LegendreField partial_legendre(const Solution& sol, std::size_t edge, const LegendreStrip& strip) {
    return partial_legendre(sol, edge_frame(sol.polygon(), edge), strip, 1.0);
}

KeldyshCoefficient keldysh_coefficient(const Solution& sol, std::size_t edge) {
    const ChartFrame frame = edge_frame(sol.polygon(), edge);
    return [&sol, frame, edge](double t, double y) {
        const Point x = frame.to_world(t, y);
        const Polygon& P = sol.polygon();
        double prod = 1.0;
        for (std::size_t j = 0; j < P.size(); ++j)
            if (j != edge) prod *= P.l(j, x);
        return sol.rhs()(x) / prod;
    };
}

KeldyshResidual keldysh_residual(const LegendreField& lf, const KeldyshCoefficient& K, double y_floor) {
    const std::size_t np = lf.np();
    const std::size_t ny = lf.ny();
    KeldyshResidual out;
    out.residual.assign(np * ny, kNaN);
    const double dp = lf.p[1] - lf.p[0];
    auto w = [&](std::size_t j, std::size_t k) { return lf.ustar_at(j, k) + lf.singular * y_log_y(lf.y[j]); };
    for (std::size_t j = 1; j + 1 < ny; ++j) {
        const double y = lf.y[j];
        if (y < y_floor) continue;
        const double hm = y - lf.y[j - 1];
        const double hp = lf.y[j + 1] - y;
        for (std::size_t k = 1; k + 1 < np; ++k) {
            const double upp = (lf.ustar_at(j, k + 1) - 2 * lf.ustar_at(j, k) + lf.ustar_at(j, k - 1)) / (dp * dp);
            const double wyy = 2.0 * ((w(j + 1, k) - w(j, k)) / hp - (w(j, k) - w(j - 1, k)) / hm) / (hp + hm);
            const double uyy = wyy - lf.singular / y;
            const double kv = K(lf.t_at(j, k), y);
            if (!(kv > 0.0)) ++out.nonpositive_coefficient;
            const double r = kv * upp + y * uyy;
            out.residual[j * np + k] = r;
            ++out.evaluated;
            if (std::abs(r) > out.sup) {
                out.sup = std::abs(r);
                out.arg_row = j;
                out.arg_col = k;
            }
        }
    }
    return out;
}

RoundTrip legendre_round_trip(const LegendreField& lf, const ConvexField& u, int probes_per_row) {
    RoundTrip out;
    const std::size_t n = lf.np();
    for (std::size_t j = 0; j < lf.ny(); ++j) {
        const double a = lf.t_at(j, 0);
        const double b = lf.t_at(j, n - 1);
        for (int q = 1; q <= probes_per_row; ++q) {
            const double t = a + (b - a) * q / (probes_per_row + 1);
            const double err = std::abs(lf.recover(t, j) - u.value(lf.frame.to_world(t, lf.y[j])));
            out.max_error = std::max(out.max_error, err);
            ++out.probes;
        }
    }
    return out;
}

}  // namespace toricma
