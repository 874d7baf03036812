#include "toricma/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "toricma/error.hpp"
#include "toricma/reference_potential.hpp"

namespace toricma {

std::vector<double> graded_axis(double lo, double hi, std::size_t cells, double grading) {
    std::vector<double> x(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k) {
        const double xi = static_cast<double>(k) / static_cast<double>(cells);
        const double smooth = xi * xi * (3.0 - 2.0 * xi);
        x[k] = lo + (hi - lo) * ((1.0 - grading) * xi + grading * smooth);
    }
    x.front() = lo;
    x.back() = hi;
    return x;
}

namespace {

constexpr std::array<std::array<int, 2>, 8> kDirections{
    {{{1, 0}}, {{-1, 0}}, {{0, 1}}, {{0, -1}}, {{1, 1}}, {{-1, 1}}, {{1, -1}}, {{-1, -1}}}};

/// Derivative weights from a least-squares quadratic fit through the centre and eight ray points.
/// Exact for quadratics; the centre weight closes each row to zero sum.
std::vector<StencilEntry> fitted_stencil(Point c, std::uint32_t centre_slot,
                                         const std::array<std::pair<std::uint32_t, Point>, 8>& ray) {
    double scale = 0.0;
    for (const auto& [slot, p] : ray) scale = std::max(scale, norm(p - c));
    Eigen::Matrix<double, 8, 5> A;
    for (int k = 0; k < 8; ++k) {
        const Vec2 d = (ray[k].second - c) / scale;
        A.row(k) << d.x, d.y, 0.5 * d.x * d.x, d.x * d.y, 0.5 * d.y * d.y;
    }
    // Weighted toward near points; unisolvent for rays in eight distinct directions.
    Eigen::Matrix<double, 8, 1> w;
    for (int k = 0; k < 8; ++k) w(k) = 1.0 / A.row(k).head<2>().squaredNorm();
    const Eigen::Matrix<double, 8, 5> WA = w.asDiagonal() * A;
    const Eigen::Matrix<double, 5, 5> N = A.transpose() * WA;
    const Eigen::Matrix<double, 5, 8> P = N.completeOrthogonalDecomposition().solve(WA.transpose());
    const double s1 = 1.0 / scale;
    const double s2 = s1 * s1;
    std::vector<StencilEntry> out;
    StencilEntry centre{centre_slot, 0, 0, 0, 0, 0};
    for (int k = 0; k < 8; ++k) {
        StencilEntry e{ray[k].first, P(2, k) * s2, P(3, k) * s2, P(4, k) * s2, P(0, k) * s1, P(1, k) * s1};
        centre.w11 -= e.w11;
        centre.w12 -= e.w12;
        centre.w22 -= e.w22;
        centre.w1 -= e.w1;
        centre.w2 -= e.w2;
        out.push_back(e);
    }
    out.push_back(centre);
    return out;
}

}  // namespace

Mesh Mesh::build(const Polygon& polygon, const MeshParams& params) {
    if (params.level < 2 || params.level > 12) throw Error(ErrorKind::ConfigError, "mesh level must lie in [2, 12]");
    if (!(params.grading >= 0.0 && params.grading <= 1.0))
        throw Error(ErrorKind::ConfigError, "mesh grading must lie in [0, 1]");
    Mesh m;
    m.polygon_ = polygon;
    m.params_ = params;
    const std::size_t cells = std::size_t{1} << params.level;
    const Point lo = polygon.lower_corner();
    const Point hi = polygon.upper_corner();
    m.xs_ = graded_axis(lo.x, hi.x, cells, params.grading);
    m.ys_ = graded_axis(lo.y, hi.y, cells, params.grading);
    const std::size_t nx = m.xs_.size();
    const std::size_t ny = m.ys_.size();
    m.kind_.assign(nx * ny, NodeKind::Outside);
    m.slot_.assign(nx * ny, -1);
    const double on_tol = 1e-13 * std::max(1.0, polygon.diameter());

    auto spacing = [&](std::size_t i, std::size_t j) {
        double h = std::numeric_limits<double>::infinity();
        if (i > 0) h = std::min(h, m.xs_[i] - m.xs_[i - 1]);
        if (i + 1 < nx) h = std::min(h, m.xs_[i + 1] - m.xs_[i]);
        if (j > 0) h = std::min(h, m.ys_[j] - m.ys_[j - 1]);
        if (j + 1 < ny) h = std::min(h, m.ys_[j + 1] - m.ys_[j]);
        return h;
    };

    std::vector<BoundarySlot> grid_boundary;
    std::vector<std::size_t> grid_boundary_index;
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            const Point p = m.grid_point(i, j);
            const double d = polygon.min_l(p);
            const std::size_t g = m.grid_index(i, j);
            if (std::abs(d) <= on_tol) {
                m.kind_[g] = NodeKind::Boundary;
                const std::size_t e = polygon.argmin_l(p);
                // Prefer the edge whose parameter range contains the point (vertices: the outgoing edge).
                std::size_t best = e;
                for (std::size_t k = 0; k < polygon.size(); ++k) {
                    if (std::abs(polygon.l(k, p)) > on_tol) continue;
                    const double t = dot(p - polygon.vertex(k), polygon.tangent(k));
                    if (t >= -on_tol && t < polygon.edge_length(k) - on_tol) {
                        best = k;
                        break;
                    }
                }
                const double t = std::clamp(dot(p - polygon.vertex(best), polygon.tangent(best)), 0.0,
                                            polygon.edge_length(best));
                grid_boundary.push_back({p, best, t});
                grid_boundary_index.push_back(g);
            } else if (d > 0.0 && d >= params.drop_fraction * spacing(i, j)) {
                m.kind_[g] = NodeKind::Interior;
                m.slot_[g] = static_cast<std::int64_t>(m.interior_ij_.size());
                m.interior_ij_.emplace_back(i, j);
                m.position_.push_back(p);
            }
        }
    const std::size_t n_int = m.interior_ij_.size();
    if (n_int == 0) throw Error(ErrorKind::MeshTooCoarse, "mesh has no interior nodes");
    for (std::size_t b = 0; b < grid_boundary.size(); ++b) {
        m.slot_[grid_boundary_index[b]] = static_cast<std::int64_t>(n_int + m.boundary_.size());
        m.boundary_.push_back(grid_boundary[b]);
    }

    m.offsets_.assign(1, 0);
    m.stencil_.reserve(n_int * 9);
    m.tensor_.assign(n_int, 0);
    for (std::size_t k = 0; k < n_int; ++k) {
        const auto [i, j] = m.interior_ij_[k];
        const Point c = m.position_[k];
        std::array<std::pair<std::uint32_t, Point>, 8> ray;
        bool tensor = true;
        for (std::size_t d = 0; d < 8; ++d) {
            const std::size_t ii = i + kDirections[d][0];
            const std::size_t jj = j + kDirections[d][1];
            const std::int64_t s = m.slot_of(ii, jj);
            if (s >= 0) {
                ray[d] = {static_cast<std::uint32_t>(s), m.grid_point(ii, jj)};
                continue;
            }
            // Walk the ray through the missing neighbour to the first boundary crossing.
            tensor = false;
            const Point target = m.grid_point(ii, jj);
            double smin = std::numeric_limits<double>::infinity();
            std::size_t edge = 0;
            for (std::size_t e = 0; e < polygon.size(); ++e) {
                const double lc = polygon.l(e, c);
                const double lt = polygon.l(e, target);
                if (lt < lc) {
                    const double s = lc / (lc - lt);
                    if (s < smin) {
                        smin = s;
                        edge = e;
                    }
                }
            }
            const Point x = c + (target - c) * smin;
            const double t = std::clamp(dot(x - polygon.vertex(edge), polygon.tangent(edge)), 0.0,
                                        polygon.edge_length(edge));
            ray[d] = {static_cast<std::uint32_t>(n_int + m.boundary_.size()), x};
            m.boundary_.push_back({x, edge, t});
        }
        m.tensor_[k] = tensor ? 1 : 0;
        if (tensor) {
            const double hl = m.xs_[i] - m.xs_[i - 1];
            const double hr = m.xs_[i + 1] - m.xs_[i];
            const double hd = m.ys_[j] - m.ys_[j - 1];
            const double hu = m.ys_[j + 1] - m.ys_[j];
            const double cross_w = 1.0 / ((hl + hr) * (hd + hu));
            auto slot = [&](int di, int dj) { return static_cast<std::uint32_t>(m.slot_of(i + di, j + dj)); };
            m.stencil_.push_back({slot(-1, 0), 2.0 / (hl * (hl + hr)), 0.0, 0.0, -hr / (hl * (hl + hr)), 0.0});
            m.stencil_.push_back({slot(1, 0), 2.0 / (hr * (hl + hr)), 0.0, 0.0, hl / (hr * (hl + hr)), 0.0});
            m.stencil_.push_back({slot(0, -1), 0.0, 0.0, 2.0 / (hd * (hd + hu)), 0.0, -hu / (hd * (hd + hu))});
            m.stencil_.push_back({slot(0, 1), 0.0, 0.0, 2.0 / (hu * (hd + hu)), 0.0, hd / (hu * (hd + hu))});
            m.stencil_.push_back({slot(1, 1), 0.0, cross_w, 0.0, 0.0, 0.0});
            m.stencil_.push_back({slot(-1, -1), 0.0, cross_w, 0.0, 0.0, 0.0});
            m.stencil_.push_back({slot(1, -1), 0.0, -cross_w, 0.0, 0.0, 0.0});
            m.stencil_.push_back({slot(-1, 1), 0.0, -cross_w, 0.0, 0.0, 0.0});
            m.stencil_.push_back({static_cast<std::uint32_t>(k), -2.0 / (hl * hr), 0.0, -2.0 / (hd * hu),
                                  (hr - hl) / (hl * hr), (hu - hd) / (hd * hu)});
        } else {
            for (const StencilEntry& e : fitted_stencil(c, static_cast<std::uint32_t>(k), ray)) m.stencil_.push_back(e);
        }
        m.offsets_.push_back(m.stencil_.size());
    }

    m.prod_l_.resize(n_int);
    m.a11_.resize(n_int);
    m.a12_.resize(n_int);
    m.a22_.resize(n_int);
    for (std::size_t k = 0; k < n_int; ++k) {
        const Point p = m.position_[k];
        m.prod_l_[k] = polygon.product_l(p);
        const Sym2 h = g0_hessian(polygon, p);
        m.a11_[k] = h.xx;
        m.a12_[k] = h.xy;
        m.a22_[k] = h.yy;
    }
    return m;
}

Point Mesh::slot_point(std::size_t s) const {
    if (s < unknowns()) return position_[s];
    return boundary_[s - unknowns()].position;
}

std::size_t Mesh::fitted_stencils() const {
    return static_cast<std::size_t>(std::count(tensor_.begin(), tensor_.end(), std::uint8_t{0}));
}

double Mesh::grading_ratio() const {
    double worst = 1.0;
    for (const auto* axis : {&xs_, &ys_})
        for (std::size_t k = 1; k + 1 < axis->size(); ++k) {
            const double a = (*axis)[k] - (*axis)[k - 1];
            const double b = (*axis)[k + 1] - (*axis)[k];
            worst = std::max({worst, a / b, b / a});
        }
    return worst;
}

std::pair<std::size_t, std::size_t> Mesh::locate_cell(Point x) const {
    auto find = [](const std::vector<double>& axis, double v) {
        const auto it = std::upper_bound(axis.begin(), axis.end(), v);
        const std::size_t k = it == axis.begin() ? 0 : static_cast<std::size_t>(it - axis.begin()) - 1;
        return std::min(k, axis.size() - 2);
    };
    return {find(xs_, x.x), find(ys_, x.y)};
}

}  // namespace toricma
