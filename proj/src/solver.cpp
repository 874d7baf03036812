#include "toricma/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "toricma/error.hpp"
#include "toricma/kernels.hpp"
#include "toricma/reference_potential.hpp"

namespace toricma {

namespace {

struct NodeHessians {
    std::vector<double> b11;
    std::vector<double> b12;
    std::vector<double> b22;
};

NodeHessians discrete_hessians(const Mesh& mesh, std::span<const double> v) {
    const std::size_t n = mesh.unknowns();
    NodeHessians h{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t k = 0; k < n; ++k) {
        double s11 = 0.0;
        double s12 = 0.0;
        double s22 = 0.0;
        for (const StencilEntry* e = mesh.stencil_begin(k); e != mesh.stencil_end(k); ++e) {
            const double vs = v[e->slot];
            s11 += e->w11 * vs;
            s12 += e->w12 * vs;
            s22 += e->w22 * vs;
        }
        h.b11[k] = s11;
        h.b12[k] = s12;
        h.b22[k] = s22;
    }
    return h;
}

ResidualField evaluate_operator(const Mesh& mesh, std::span<const double> h_nodes, const NodeHessians& b) {
    const std::size_t n = mesh.unknowns();
    ResidualField f;
    f.residual.resize(n);
    f.min_eig.resize(n);
    const kernels::MaBatch batch{mesh.d2u0_11().data(), mesh.d2u0_12().data(), mesh.d2u0_22().data(),
                                 b.b11.data(),          b.b12.data(),          b.b22.data(),
                                 mesh.prod_l().data(),  h_nodes.data(),        n};
    kernels::ma_residual(batch, f.residual.data(), f.min_eig.data());
    f.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double r = std::abs(f.residual[k]);
        if (!(r <= f.sup)) {
            f.sup = std::isnan(r) ? std::numeric_limits<double>::infinity() : r;
            f.argmax = k;
        }
        if (f.min_eig[k] < f.min_eigenvalue || std::isnan(f.min_eig[k])) {
            f.min_eigenvalue = std::isnan(f.min_eig[k]) ? -std::numeric_limits<double>::infinity() : f.min_eig[k];
            f.argmin = k;
        }
    }
    f.spd = f.min_eigenvalue > 0.0;
    return f;
}

double l2(const std::vector<double>& r) {
    double s = 0.0;
    for (double x : r) s += x * x;
    return std::sqrt(s);
}

using SpMat = Eigen::SparseMatrix<double>;
using Lu = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;

/// Linearisation: row k holds prod_l (m22 w11 + m11 w22 - 2 m12 w12) over unknown slots.
void assemble_jacobian(const Mesh& mesh, const NodeHessians& b, std::vector<Eigen::Triplet<double>>& triplets) {
    triplets.clear();
    const std::size_t n = mesh.unknowns();
    for (std::size_t k = 0; k < n; ++k) {
        const double m11 = mesh.d2u0_11()[k] + b.b11[k];
        const double m12 = mesh.d2u0_12()[k] + b.b12[k];
        const double m22 = mesh.d2u0_22()[k] + b.b22[k];
        const double w = mesh.prod_l()[k];
        for (const StencilEntry* e = mesh.stencil_begin(k); e != mesh.stencil_end(k); ++e) {
            if (e->slot >= n) continue;
            triplets.emplace_back(static_cast<int>(k), static_cast<int>(e->slot),
                                  w * (m22 * e->w11 + m11 * e->w22 - 2.0 * m12 * e->w12));
        }
    }
}

/// Discrete harmonic extension of the boundary slots (Laplacian rows w11 + w22).
void harmonic_extension(const Mesh& mesh, std::vector<double>& v) {
    const std::size_t n = mesh.unknowns();
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k)
        for (const StencilEntry* e = mesh.stencil_begin(k); e != mesh.stencil_end(k); ++e) {
            const double w = e->w11 + e->w22;
            if (e->slot < n) triplets.emplace_back(static_cast<int>(k), static_cast<int>(e->slot), w);
            else rhs(static_cast<Eigen::Index>(k)) -= w * v[e->slot];
        }
    SpMat A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    A.setFromTriplets(triplets.begin(), triplets.end());
    Lu lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw Error(ErrorKind::IndefiniteHessianUnrecoverable, "harmonic extension failed");
    const Eigen::VectorXd x = lu.solve(rhs);
    for (std::size_t k = 0; k < n; ++k) v[k] = x(static_cast<Eigen::Index>(k));
}

struct NewtonOutcome {
    bool converged = false;
    int iterations = 0;
    ResidualField residual;
    std::vector<double> history;
    std::string failure;
};

NewtonOutcome newton(const Mesh& mesh, std::span<const double> h_nodes, std::vector<double>& v,
                     const SolverParams& params) {
    const std::size_t n = mesh.unknowns();
    NewtonOutcome out;
    NodeHessians b = discrete_hessians(mesh, v);
    out.residual = evaluate_operator(mesh, h_nodes, b);
    out.history.push_back(out.residual.sup);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(n * 9);
    SpMat J(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Lu lu;
    bool analysed = false;
    std::vector<double> trial(v.size());
    for (int it = 0; it < params.max_iter; ++it) {
        if (out.residual.sup <= params.tol) {
            out.converged = true;
            return out;
        }
        assemble_jacobian(mesh, b, triplets);
        J.setFromTriplets(triplets.begin(), triplets.end());
        if (!analysed) {
            lu.analyzePattern(J);
            analysed = true;
        }
        lu.factorize(J);
        if (lu.info() != Eigen::Success) {
            out.failure = "singular Newton linearisation";
            return out;
        }
        Eigen::Map<const Eigen::VectorXd> F(out.residual.residual.data(), static_cast<Eigen::Index>(n));
        const Eigen::VectorXd delta = lu.solve(-F);
        const double base = l2(out.residual.residual);
        bool accepted = false;
        for (double theta = 1.0; theta >= params.damping_floor; theta *= 0.5) {
            std::copy(v.begin(), v.end(), trial.begin());
            for (std::size_t k = 0; k < n; ++k) trial[k] += theta * delta(static_cast<Eigen::Index>(k));
            NodeHessians bt = discrete_hessians(mesh, trial);
            ResidualField ft = evaluate_operator(mesh, h_nodes, bt);
            if (ft.spd && l2(ft.residual) <= (1.0 - 1e-4 * theta) * base) {
                v.swap(trial);
                b = std::move(bt);
                out.residual = std::move(ft);
                accepted = true;
                break;
            }
        }
        out.iterations = it + 1;
        out.history.push_back(out.residual.sup);
        if (!accepted) {
            std::ostringstream msg;
            msg << "line search fell below the damping floor at residual " << out.residual.sup;
            out.failure = msg.str();
            return out;
        }
    }
    out.converged = out.residual.sup <= params.tol;
    if (!out.converged) out.failure = "iteration limit reached at residual " + std::to_string(out.residual.sup);
    return out;
}

}  // namespace

ResidualField discrete_operator(const Mesh& mesh, std::span<const double> h_nodes, std::span<const double> v_slots) {
    return evaluate_operator(mesh, h_nodes, discrete_hessians(mesh, v_slots));
}

ResidualField discrete_operator(const Mesh& mesh, const RhsField& rhs, std::span<const double> v_slots) {
    std::vector<double> h(mesh.unknowns());
    for (std::size_t k = 0; k < h.size(); ++k) h[k] = rhs(mesh.interior_point(k));
    return discrete_operator(mesh, h, v_slots);
}

std::vector<double> boundary_slot_values(const Mesh& mesh, const BoundaryData& data) {
    std::vector<double> v(mesh.slots(), 0.0);
    for (std::size_t s = mesh.unknowns(); s < mesh.slots(); ++s) {
        const BoundarySlot& b = mesh.boundary_slot(s);
        v[s] = data.v_trace(b.edge, b.t);
    }
    return v;
}

Solution solve_on_mesh(std::shared_ptr<const Mesh> mesh, BoundaryData boundary, const RhsField& rhs,
                       const SolverParams& params) {
    const Mesh& m = *mesh;
    const std::size_t n = m.unknowns();
    std::vector<double> h(n);
    for (std::size_t k = 0; k < n; ++k) {
        h[k] = rhs(m.interior_point(k));
        if (!(h[k] > 0.0)) throw Error(ErrorKind::NonPositiveH, "H is not positive at a mesh node", k);
    }
    std::vector<double> v = boundary_slot_values(m, boundary);
    const bool zero_trace = std::all_of(v.begin() + static_cast<std::ptrdiff_t>(n), v.end(), [](double x) { return x == 0.0; });
    if (!zero_trace) harmonic_extension(m, v);
    if (!discrete_operator(m, h, v).spd) {
        std::fill(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
        if (!discrete_operator(m, h, v).spd)
            throw Error(ErrorKind::IndefiniteHessianUnrecoverable, "no admissible initial guess");
    }
    const std::vector<double> start = v;
    NewtonOutcome out = newton(m, h, v, params);
    if (!out.converged && params.continuation_steps > 0) {
        // Homotopy from the right-hand side that the initial guess solves exactly.
        v = start;
        const ResidualField r0 = discrete_operator(m, h, v);
        std::vector<double> h0(n);
        for (std::size_t k = 0; k < n; ++k) h0[k] = r0.residual[k] + h[k];
        std::vector<double> ht(n);
        std::vector<double> history;
        int iterations = 0;
        for (int step = 1; step <= params.continuation_steps; ++step) {
            const double theta = static_cast<double>(step) / params.continuation_steps;
            for (std::size_t k = 0; k < n; ++k) ht[k] = (1.0 - theta) * h0[k] + theta * h[k];
            out = newton(m, ht, v, params);
            iterations += out.iterations;
            history.insert(history.end(), out.history.begin(), out.history.end());
            if (!out.converged) break;
        }
        out.iterations = iterations;
        out.history = history;
    }
    if (!out.converged) throw Error(ErrorKind::NewtonStalled, out.failure);

    Solution sol(std::move(mesh), std::move(boundary), rhs, std::move(v));
    sol.converged = true;
    sol.residual_norm = out.residual.sup;
    sol.min_eigenvalue = out.residual.min_eigenvalue;
    sol.iterations = out.iterations;
    sol.residual_history = std::move(out.history);
    return sol;
}

Solution solve(const Polygon& polygon, const RhsField& rhs, std::span<const double> vertex_values,
               const MeshParams& mesh_params, const SolverParams& params) {
    BoundaryData boundary = BoundaryData::assemble(polygon, rhs, vertex_values, params.compat_tol);
    auto mesh = std::make_shared<const Mesh>(Mesh::build(polygon, mesh_params));
    return solve_on_mesh(std::move(mesh), std::move(boundary), rhs, params);
}

// ---------------------------------------------------------------------------------------------
// Solution field

Solution::Solution(std::shared_ptr<const Mesh> mesh, BoundaryData boundary, RhsField rhs, std::vector<double> slots)
    : mesh_(std::move(mesh)), boundary_(std::move(boundary)), rhs_(std::move(rhs)), slots_(std::move(slots)) {
    build_node_data();
}

Sym2 Solution::discrete_hessian(std::size_t k) const {
    const Mesh& m = *mesh_;
    Sym2 h{m.d2u0_11()[k], m.d2u0_12()[k], m.d2u0_22()[k]};
    for (const StencilEntry* e = m.stencil_begin(k); e != m.stencil_end(k); ++e) {
        const double v = slots_[e->slot];
        h.xx += e->w11 * v;
        h.xy += e->w12 * v;
        h.yy += e->w22 * v;
    }
    return h;
}

namespace {

/// Derivative at the centre of five consecutive grid values along one axis (Lagrange weights).
bool five_point(const Mesh& m, const std::vector<double>& slots, std::size_t i, std::size_t j, bool along_x,
                double& out) {
    const std::vector<double>& axis = along_x ? m.xs() : m.ys();
    const std::size_t c = along_x ? i : j;
    if (c < 2 || c + 2 >= axis.size()) return false;
    double x[5];
    double f[5];
    for (int q = 0; q < 5; ++q) {
        const std::size_t a = c + q - 2;
        const std::int64_t s = along_x ? m.slot_of(a, j) : m.slot_of(i, a);
        if (s < 0) return false;
        x[q] = axis[a];
        f[q] = slots[static_cast<std::size_t>(s)];
    }
    double d = 0.0;
    for (int q = 0; q < 5; ++q) {
        double w = 0.0;
        if (q == 2) {
            for (int l = 0; l < 5; ++l)
                if (l != 2) w += 1.0 / (x[2] - x[l]);
        } else {
            double num = 1.0;
            double den = 1.0;
            for (int l = 0; l < 5; ++l) {
                if (l == q) continue;
                den *= x[q] - x[l];
                if (l != 2) num *= x[2] - x[l];
            }
            w = num / den;
        }
        d += w * f[q];
    }
    out = d;
    return true;
}

}  // namespace

void Solution::build_node_data() {
    const Mesh& m = *mesh_;
    const std::size_t total = m.nx() * m.ny();
    has_.assign(total, 0);
    nv_.assign(total, 0.0);
    ng_.assign(total, Vec2{});
    nh_.assign(total, Sym2{});
    for (std::size_t k = 0; k < m.unknowns(); ++k) {
        const auto [i, j] = m.interior_ij(k);
        const std::size_t g = m.grid_index(i, j);
        Vec2 grad;
        Sym2 hess;
        for (const StencilEntry* e = m.stencil_begin(k); e != m.stencil_end(k); ++e) {
            const double v = slots_[e->slot];
            grad += Vec2{e->w1, e->w2} * v;
            hess += Sym2{e->w11, e->w12, e->w22} * v;
        }
        // Five-point gradients along grid lines where all four neighbours carry values.
        double gx = 0.0;
        double gy = 0.0;
        if (five_point(m, slots_, i, j, true, gx)) grad.x = gx;
        if (five_point(m, slots_, i, j, false, gy)) grad.y = gy;
        has_[g] = 1;
        nv_[g] = slots_[k];
        ng_[g] = grad;
        nh_[g] = hess;
    }
    // Boundary grid nodes on axis-parallel edges: tangential derivative from the trace, normal
    // derivative one-sided along the grid line, Hessian copied from the nearest inward node.
    const Polygon& P = m.polygon();
    auto axis_dir = [](Vec2 n, int& di, int& dj) {
        di = 0;
        dj = 0;
        if (std::abs(std::abs(n.x) - 1.0) < 1e-14) di = n.x > 0 ? 1 : -1;
        else if (std::abs(std::abs(n.y) - 1.0) < 1e-14) dj = n.y > 0 ? 1 : -1;
        return di != 0 || dj != 0;
    };
    auto inside_grid = [&](long i, long j) {
        return i >= 0 && j >= 0 && i < static_cast<long>(m.nx()) && j < static_cast<long>(m.ny());
    };
    for (std::size_t j = 0; j < m.ny(); ++j)
        for (std::size_t i = 0; i < m.nx(); ++i) {
            if (m.kind(i, j) != NodeKind::Boundary) continue;
            const std::int64_t s = m.slot_of(i, j);
            const BoundarySlot& bs = m.boundary_slot(static_cast<std::size_t>(s));
            const std::size_t e = bs.edge;
            const Point p = m.grid_point(i, j);
            const std::size_t g = m.grid_index(i, j);
            const bool at_vertex = bs.t <= 0.0 || bs.t >= P.edge_length(e);
            if (at_vertex) {
                const std::size_t vtx = bs.t <= 0.0 ? e : P.next(e);
                const std::size_t ein = P.prev(vtx);
                int di1, dj1, di2, dj2;
                if (!axis_dir(P.normal(vtx), di1, dj1) || !axis_dir(P.normal(ein), di2, dj2)) continue;
                const long ii = static_cast<long>(i) + di1 + di2;
                const long jj = static_cast<long>(j) + dj1 + dj2;
                if (!inside_grid(ii, jj)) continue;
                const std::size_t gi = m.grid_index(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
                if (!has_[gi] || m.kind(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)) != NodeKind::Interior)
                    continue;
                const double d_out = boundary_.v_trace_derivative(vtx, 0.0);
                const double d_in = boundary_.v_trace_derivative(ein, P.edge_length(ein));
                const Vec2 a = P.tangent(vtx);
                const Vec2 b = P.tangent(ein);
                const double det = cross(a, b);
                has_[g] = 2;
                nv_[g] = slots_[static_cast<std::size_t>(s)];
                ng_[g] = Vec2{(d_out * b.y - d_in * a.y) / det, (a.x * d_in - b.x * d_out) / det};
                nh_[g] = nh_[gi];
                continue;
            }
            int di, dj;
            if (!axis_dir(P.normal(e), di, dj)) continue;
            const long i1 = static_cast<long>(i) + di, j1 = static_cast<long>(j) + dj;
            const long i2 = i1 + di, j2 = j1 + dj;
            if (!inside_grid(i2, j2)) continue;
            const std::int64_t s1 = m.slot_of(static_cast<std::size_t>(i1), static_cast<std::size_t>(j1));
            const std::int64_t s2 = m.slot_of(static_cast<std::size_t>(i2), static_cast<std::size_t>(j2));
            if (s1 < 0 || s2 < 0 || m.kind(static_cast<std::size_t>(i1), static_cast<std::size_t>(j1)) != NodeKind::Interior)
                continue;
            const Point p1 = m.grid_point(static_cast<std::size_t>(i1), static_cast<std::size_t>(j1));
            const Point p2 = m.grid_point(static_cast<std::size_t>(i2), static_cast<std::size_t>(j2));
            const double d1 = norm(p1 - p);
            const double d2 = norm(p2 - p1);
            const double f0 = slots_[static_cast<std::size_t>(s)];
            const double f1 = slots_[static_cast<std::size_t>(s1)];
            const double f2 = slots_[static_cast<std::size_t>(s2)];
            const double dn = -(2.0 * d1 + d2) / (d1 * (d1 + d2)) * f0 + (d1 + d2) / (d1 * d2) * f1 -
                              d1 / (d2 * (d1 + d2)) * f2;
            const double dt = boundary_.v_trace_derivative(e, bs.t);
            has_[g] = 2;
            nv_[g] = f0;
            ng_[g] = P.tangent(e) * dt + P.normal(e) * dn;
            nh_[g] = nh_[m.grid_index(static_cast<std::size_t>(i1), static_cast<std::size_t>(j1))];
        }
}

FieldSample Solution::taylor_from(std::size_t g, Point x, int order) const {
    const Mesh& m = *mesh_;
    const Point c = m.grid_point(g % m.nx(), g / m.nx());
    const Vec2 d = x - c;
    FieldSample s;
    s.value = nv_[g] + dot(ng_[g], d) + 0.5 * nh_[g].quad(d);
    if (order >= 1) s.grad = ng_[g] + nh_[g].apply(d);
    if (order >= 2) s.hess = nh_[g];
    return s;
}

FieldSample Solution::evaluate_v(Point x, int order) const {
    const Mesh& m = *mesh_;
    const Polygon& P = m.polygon();
    const double slack = 1e-13 * std::max(1.0, P.diameter());
    if (!P.contains(x, slack))
        throw Error(ErrorKind::PointOutsidePolygon, "evaluation point outside the polygon", P.argmin_l(x));
    if (P.min_l(x) <= slack) {
        if (order > 0) throw Error(ErrorKind::BoundaryPoint, "derivatives requested on the boundary", P.argmin_l(x));
        return {boundary_.v_at(x), {}, {}};
    }
    const auto [i, j] = m.locate_cell(x);
    const std::size_t g00 = m.grid_index(i, j);
    const std::size_t g10 = m.grid_index(i + 1, j);
    const std::size_t g01 = m.grid_index(i, j + 1);
    const std::size_t g11 = m.grid_index(i + 1, j + 1);
    if (has_[g00] && has_[g10] && has_[g01] && has_[g11]) {
        const double hx = m.xs()[i + 1] - m.xs()[i];
        const double hy = m.ys()[j + 1] - m.ys()[j];
        const double s = (x.x - m.xs()[i]) / hx;
        const double t = (x.y - m.ys()[j]) / hy;
        // Cubic Hermite basis on [0, 1]: values H0, H1 and slopes G0, G1, with derivatives.
        auto basis = [](double u, double* H, double* G, double* dH, double* dG) {
            const double u2 = u * u;
            const double u3 = u2 * u;
            H[0] = 2 * u3 - 3 * u2 + 1;
            H[1] = -2 * u3 + 3 * u2;
            G[0] = u3 - 2 * u2 + u;
            G[1] = u3 - u2;
            dH[0] = 6 * u2 - 6 * u;
            dH[1] = -6 * u2 + 6 * u;
            dG[0] = 3 * u2 - 4 * u + 1;
            dG[1] = 3 * u2 - 2 * u;
        };
        double Hs[2], Gs[2], dHs[2], dGs[2], Ht[2], Gt[2], dHt[2], dGt[2];
        basis(s, Hs, Gs, dHs, dGs);
        basis(t, Ht, Gt, dHt, dGt);
        const std::size_t corner[2][2] = {{g00, g01}, {g10, g11}};
        FieldSample out;
        double fx = 0.0;
        double fy = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const std::size_t g = corner[a][b];
                const double f = nv_[g];
                const double gx = ng_[g].x * hx;
                const double gy = ng_[g].y * hy;
                const double gxy = nh_[g].xy * hx * hy;
                out.value += Hs[a] * Ht[b] * f + Gs[a] * Ht[b] * gx + Hs[a] * Gt[b] * gy + Gs[a] * Gt[b] * gxy;
                if (order >= 1) {
                    fx += dHs[a] * Ht[b] * f + dGs[a] * Ht[b] * gx + dHs[a] * Gt[b] * gy + dGs[a] * Gt[b] * gxy;
                    fy += Hs[a] * dHt[b] * f + Gs[a] * dHt[b] * gx + Hs[a] * dGt[b] * gy + Gs[a] * dGt[b] * gxy;
                }
            }
        out.grad = {fx / hx, fy / hy};
        if (order >= 2)
            out.hess = nh_[g00] * ((1 - s) * (1 - t)) + nh_[g10] * (s * (1 - t)) + nh_[g01] * ((1 - s) * t) +
                       nh_[g11] * (s * t);
        return out;
    }
    // Cut cell: expand about the nearest node carrying data, searching outward from the cell.
    std::size_t best = static_cast<std::size_t>(-1);
    double best_d = std::numeric_limits<double>::infinity();
    for (long radius = 1; radius <= static_cast<long>(std::max(m.nx(), m.ny())) && best == static_cast<std::size_t>(-1);
         radius *= 2)
        for (long jj = static_cast<long>(j) - radius + 1; jj <= static_cast<long>(j) + radius; ++jj)
            for (long ii = static_cast<long>(i) - radius + 1; ii <= static_cast<long>(i) + radius; ++ii) {
                if (ii < 0 || jj < 0 || ii >= static_cast<long>(m.nx()) || jj >= static_cast<long>(m.ny())) continue;
                const std::size_t g = m.grid_index(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
                if (has_[g] != 1) continue;
                const double d = norm(m.grid_point(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)) - x);
                if (d < best_d) {
                    best_d = d;
                    best = g;
                }
            }
    if (best == static_cast<std::size_t>(-1)) throw Error(ErrorKind::MeshTooCoarse, "no interior node near point");
    return taylor_from(best, x, order);
}

FieldSample Solution::evaluate(Point x, int order) const {
    const Polygon& P = polygon();
    FieldSample v = evaluate_v(x, order);
    const double slack = 1e-13 * std::max(1.0, P.diameter());
    if (P.min_l(x) <= slack) return {boundary_.u_at(x), {}, {}};
    FieldSample u;
    u.value = u0_eval(P, x) + v.value;
    if (order >= 1) u.grad = u0_gradient(P, x) + v.grad;
    if (order >= 2) u.hess = g0_hessian(P, x) + v.hess;
    return u;
}

}  // namespace toricma
