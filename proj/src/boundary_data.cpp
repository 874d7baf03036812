#include "toricma/boundary_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "toricma/error.hpp"
#include "toricma/quadrature.hpp"

namespace toricma {

EdgeProfile edge_h_from_H(const Polygon& polygon, const RhsField& rhs, std::size_t edge, double tolerance,
                          bool check) {
    if (edge >= polygon.size()) throw Error(ErrorKind::ConfigError, "edge index out of range", edge);
    const std::size_t ip = polygon.prev(edge);
    const std::size_t in = polygon.next(edge);
    const Vec2 T = polygon.tangent(edge);
    EdgeProfile p;
    p.length = polygon.edge_length(edge);
    p.c_prev = dot(polygon.normal(ip), T);
    p.c_next = -dot(polygon.normal(in), T);
    const Point v = polygon.vertex(edge);
    const double cc = p.c_prev * p.c_next;
    const RhsField::Evaluator H = rhs.evaluator();
    // l_{i-1} = c_prev t and l_{i+1} = c_next (L - t) along the edge, so both factors cancel exactly.
    p.h = [polygon, H, v, T, cc, edge, ip, in](double t) {
        const Point x = v + T * t;
        double rest = 1.0;
        for (std::size_t j = 0; j < polygon.size(); ++j)
            if (j != edge && j != ip && j != in) rest *= polygon.l(j, x);
        return H(x) / (cc * rest);
    };
    p.h0 = p.h(0.0);
    p.hL = p.h(p.length);
    if (check) {
        const double want0 = p.length * p.c_prev;
        const double wantL = p.length * p.c_next;
        auto off = [tolerance](double got, double want) {
            return !(std::abs(got - want) <= tolerance * std::max(1.0, std::abs(want)));
        };
        if (off(p.h0, want0) || off(p.hL, wantL)) {
            std::ostringstream msg;
            msg << "edge endpoint limits h(0) = " << p.h0 << ", h(L) = " << p.hL << " differ from the compatible values "
                << want0 << ", " << wantL;
            throw Error(ErrorKind::IncompatibleH, msg.str(), edge);
        }
    }
    if (!(p.h0 > 0.0) || !(p.hL > 0.0)) throw Error(ErrorKind::NonPositiveH, "edge profile is not positive", edge);
    return p;
}

namespace {
double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }
}  // namespace

EdgeTrace::EdgeTrace(std::function<double(double)> h, double length, double a_left, double a_right,
                     std::size_t edge, std::size_t samples)
    : h_(std::move(h)), edge_(edge), length_(length), a_left_(a_left), a_right_(a_right) {
    if (!(length > 0.0)) throw Error(ErrorKind::ConfigError, "edge length must be positive", edge);
    samples = std::max<std::size_t>(samples, 3);
    h0_ = h_(0.0);
    hL_ = h_(length_);
    if (!std::isfinite(h0_) || !std::isfinite(hL_))
        throw Error(ErrorKind::QuadratureFailure, "endpoint values of h are not finite", edge);
    const double logL = std::log(length_);
    w0_ = a_left_ - hL_ * logL;
    wL_ = a_right_ - h0_ * logL;

    const std::size_t n = samples - 1;
    t_.resize(samples);
    for (std::size_t k = 0; k <= n; ++k)
        t_[k] = 0.5 * length_ * (1.0 - std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)));
    t_.front() = 0.0;
    t_.back() = length_;

    const double L = length_;
    I1_.assign(samples, 0.0);
    I2_.assign(samples, 0.0);
    for (std::size_t k = 1; k <= n; ++k)
        I1_[k] = I1_[k - 1] + integrate([this](double s) { return s * r(s); }, t_[k - 1], t_[k]);
    for (std::size_t k = n; k-- > 0;)
        I2_[k] = I2_[k + 1] + integrate([this, L](double s) { return (L - s) * r(s); }, t_[k], t_[k + 1]);

    u_.resize(samples);
    w_.resize(samples);
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = t_[k];
        w_[k] = w0_ + (wL_ - w0_) * t / L - ((L - t) * I1_[k] + t * I2_[k]) / L;
        u_[k] = singular(t) + w_[k];
    }
    u_.front() = a_left_;
    u_.back() = a_right_;
}

double EdgeTrace::r(double tau) const {
    const double L = length_;
    const double lin = h0_ + (hL_ - h0_) * tau / L;
    return (h_(tau) - lin) / (tau * (L - tau));
}

std::pair<double, double> EdgeTrace::moments(double t) const {
    const double L = length_;
    if (t <= 0.0) return {0.0, I2_.front()};
    if (t >= L) return {I1_.back(), 0.0};
    const std::size_t k = static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin()) - 1;
    // Spans of a few ulps contribute below rounding and defeat the quadrature error estimate.
    const double tiny = 16.0 * std::numeric_limits<double>::epsilon() * L;
    double I1 = I1_[k];
    double I2 = I2_[k + 1];
    if (t - t_[k] > tiny) I1 += integrate([this](double s) { return s * r(s); }, t_[k], t);
    if (t_[k + 1] - t > tiny) I2 += integrate([this, L](double s) { return (L - s) * r(s); }, t, t_[k + 1]);
    return {I1, I2};
}

double EdgeTrace::singular(double t) const {
    const double L = length_;
    return (h0_ / L) * xlogx(t) + (hL_ / L) * xlogx(L - t);
}

double EdgeTrace::singular_derivative(double t) const {
    const double L = length_;
    return (h0_ / L) * (std::log(t) + 1.0) - (hL_ / L) * (std::log(L - t) + 1.0);
}

double EdgeTrace::remainder(double t) const {
    const double L = length_;
    const auto [I1, I2] = moments(t);
    return w0_ + (wL_ - w0_) * t / L - ((L - t) * I1 + t * I2) / L;
}

double EdgeTrace::remainder_derivative(double t) const {
    const double L = length_;
    const auto [I1, I2] = moments(t);
    return (wL_ - w0_) / L + (I1 - I2) / L;
}

double EdgeTrace::value(double t) const {
    if (t <= 0.0) return a_left_;
    if (t >= length_) return a_right_;
    return singular(t) + remainder(t);
}

double EdgeTrace::derivative(double t) const { return singular_derivative(t) + remainder_derivative(t); }

double EdgeTrace::second_derivative(double t) const { return h_(t) / (t * (length_ - t)); }

EdgeTrace solve_edge_ode(std::function<double(double)> h, double length, double a_left, double a_right,
                         std::size_t edge, std::size_t samples) {
    return EdgeTrace(std::move(h), length, a_left, a_right, edge, samples);
}

BoundaryData BoundaryData::assemble(const Polygon& polygon, const RhsField& rhs,
                                    std::span<const double> vertex_values, double compat_tolerance) {
    if (vertex_values.size() != polygon.size())
        throw Error(ErrorKind::ConfigError, "need one vertex value per vertex");
    BoundaryData data;
    data.polygon_ = polygon;
    data.vertex_values_.assign(vertex_values.begin(), vertex_values.end());
    const std::size_t n = polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
        data.profiles_.push_back(edge_h_from_H(polygon, rhs, i, compat_tolerance));
        const EdgeProfile& p = data.profiles_.back();
        data.traces_.push_back(solve_edge_ode(p.h, p.length, vertex_values[i], vertex_values[(i + 1) % n], i));
    }
    return data;
}

double BoundaryData::v_trace(std::size_t edge, double t) const {
    const EdgeTrace& tr = traces_[edge];
    const EdgeProfile& p = profiles_[edge];
    const double L = p.length;
    const std::size_t ip = polygon_.prev(edge);
    const std::size_t in = polygon_.next(edge);
    const Point x = polygon_.edge_point(edge, t);
    double rest = 0.0;
    for (std::size_t j = 0; j < polygon_.size(); ++j)
        if (j != edge && j != ip && j != in) rest += xlogx(polygon_.l(j, x));
    if (t <= 0.0) return vertex_values_[edge] - xlogx(p.c_next * L) - rest;
    if (t >= L) return vertex_values_[in] - xlogx(p.c_prev * L) - rest;
    return (tr.h0() / L - p.c_prev) * xlogx(t) + (tr.hL() / L - p.c_next) * xlogx(L - t) -
           p.c_prev * std::log(p.c_prev) * t - p.c_next * std::log(p.c_next) * (L - t) - rest + tr.remainder(t);
}

double BoundaryData::v_trace_derivative(std::size_t edge, double t) const {
    const EdgeTrace& tr = traces_[edge];
    const EdgeProfile& p = profiles_[edge];
    const double L = p.length;
    const std::size_t ip = polygon_.prev(edge);
    const std::size_t in = polygon_.next(edge);
    const Point x = polygon_.edge_point(edge, t);
    const Vec2 T = polygon_.tangent(edge);
    double rest = 0.0;
    for (std::size_t j = 0; j < polygon_.size(); ++j)
        if (j != edge && j != ip && j != in) rest += (std::log(polygon_.l(j, x)) + 1.0) * dot(polygon_.normal(j), T);
    const double floor = 1e-12 * L;
    double d = -p.c_prev * std::log(p.c_prev) + p.c_next * std::log(p.c_next) - rest + tr.remainder_derivative(t);
    const double m0 = tr.h0() / L - p.c_prev;
    const double mL = tr.hL() / L - p.c_next;
    if (m0 != 0.0) d += m0 * (std::log(std::max(t, floor)) + 1.0);
    if (mL != 0.0) d -= mL * (std::log(std::max(L - t, floor)) + 1.0);
    return d;
}

std::pair<std::size_t, double> BoundaryData::locate(Point x) const {
    const double slack = 1e-12 * std::max(1.0, polygon_.diameter());
    std::size_t best = polygon_.argmin_l(x);
    double best_d = std::abs(polygon_.l(best, x));
    for (std::size_t i = 0; i < polygon_.size(); ++i) {
        const double d = std::abs(polygon_.l(i, x));
        const double t = dot(x - polygon_.vertex(i), polygon_.tangent(i));
        if (d < best_d && t >= -slack && t <= polygon_.edge_length(i) + slack) {
            best = i;
            best_d = d;
        }
    }
    const double t = std::clamp(dot(x - polygon_.vertex(best), polygon_.tangent(best)), 0.0,
                                polygon_.edge_length(best));
    return {best, t};
}

double BoundaryData::u_at(Point x) const {
    const auto [e, t] = locate(x);
    return u_trace(e, t);
}

double BoundaryData::v_at(Point x) const {
    const auto [e, t] = locate(x);
    return v_trace(e, t);
}

}  // namespace toricma
