#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "toricma/polygon.hpp"
#include "toricma/rhs.hpp"

namespace toricma {

/// Restriction data h(t) = H t(L-t) / prod_{j != i} l_j along edge i, finite up to the endpoints.
struct EdgeProfile {
    std::function<double(double)> h;
    double length = 0.0;
    /// Limits h(0), h(L) from the linear factors of the two adjacent edge functions.
    double h0 = 0.0;
    double hL = 0.0;
    /// n_{i-1}.T_i and -n_{i+1}.T_i; compatibility means h0 = L c_prev and hL = L c_next.
    double c_prev = 0.0;
    double c_next = 0.0;
};

/// Throws IncompatibleH when an endpoint limit differs from its compatible value beyond tolerance.
EdgeProfile edge_h_from_H(const Polygon& polygon, const RhsField& rhs, std::size_t edge, double tolerance = 1e-8,
                          bool check = true);

/// Solution of u'' = h/(t(L-t)) on [0, L] with u(0) = a_left, u(L) = a_right, written as
/// u = (h0/L) t log t + (hL/L)(L-t) log(L-t) + w with w'' = (h - linear interpolant)/(t(L-t)).
class EdgeTrace {
public:
    EdgeTrace() = default;
    EdgeTrace(std::function<double(double)> h, double length, double a_left, double a_right, std::size_t edge,
              std::size_t samples);

    std::size_t edge() const { return edge_; }
    double length() const { return length_; }
    double h0() const { return h0_; }
    double hL() const { return hL_; }
    double a_left() const { return a_left_; }
    double a_right() const { return a_right_; }
    double h(double t) const { return h_(t); }

    double value(double t) const;
    /// u'(t) for t in (0, L).
    double derivative(double t) const;
    /// h(t)/(t(L-t)) for t in (0, L).
    double second_derivative(double t) const;
    /// Smooth remainder w and its derivative.
    double remainder(double t) const;
    double remainder_derivative(double t) const;
    /// Singular part (h0/L) t log t + (hL/L)(L-t) log(L-t) and its derivative.
    double singular(double t) const;
    double singular_derivative(double t) const;

    /// Graded sample grid clustered toward both endpoints, with u and w at each node.
    const std::vector<double>& t() const { return t_; }
    const std::vector<double>& u() const { return u_; }
    const std::vector<double>& w() const { return w_; }

private:
    double r(double tau) const;
    /// I1(t) = int_0^t tau r, I2(t) = int_t^L (L - tau) r.
    std::pair<double, double> moments(double t) const;

    std::function<double(double)> h_;
    std::size_t edge_ = 0;
    double length_ = 1.0;
    double h0_ = 0.0;
    double hL_ = 0.0;
    double a_left_ = 0.0;
    double a_right_ = 0.0;
    double w0_ = 0.0;
    double wL_ = 0.0;
    std::vector<double> t_;
    std::vector<double> I1_;
    std::vector<double> I2_;
    std::vector<double> u_;
    std::vector<double> w_;
};

EdgeTrace solve_edge_ode(std::function<double(double)> h, double length, double a_left, double a_right,
                         std::size_t edge = 0, std::size_t samples = 1025);

/// Dirichlet traces of u and v = u - u0 on every edge.
class BoundaryData {
public:
    static BoundaryData assemble(const Polygon& polygon, const RhsField& rhs, std::span<const double> vertex_values,
                                 double compat_tolerance = 1e-8);

    const Polygon& polygon() const { return polygon_; }
    const EdgeTrace& trace(std::size_t edge) const { return traces_[edge]; }
    const EdgeProfile& profile(std::size_t edge) const { return profiles_[edge]; }
    const std::vector<double>& vertex_values() const { return vertex_values_; }

    double u_trace(std::size_t edge, double t) const { return traces_[edge].value(t); }
    /// u - sum_{j != i} l_j log l_j with the logarithmic terms cancelled analytically.
    double v_trace(std::size_t edge, double t) const;
    double v_trace_derivative(std::size_t edge, double t) const;

    /// Edge nearest to a boundary point and its arclength parameter.
    std::pair<std::size_t, double> locate(Point x) const;
    double u_at(Point x) const;
    double v_at(Point x) const;

private:
    Polygon polygon_ = Polygon::from_vertices({{0, 0}, {1, 0}, {0, 1}});
    std::vector<EdgeProfile> profiles_;
    std::vector<EdgeTrace> traces_;
    std::vector<double> vertex_values_;
};

}  // namespace toricma
