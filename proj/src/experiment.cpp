#include "toricma/experiment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>

#include "toricma/barrier.hpp"
#include "toricma/boundary_data.hpp"
#include "toricma/diagnostics.hpp"
#include "toricma/legendre.hpp"
#include "toricma/reference_potential.hpp"

namespace toricma {

namespace {

using json = nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Fixed-format CSV writer; %.17g keeps reruns byte-identical and values round-trippable.
class Csv {
public:
    Csv(const std::filesystem::path& path, const char* header) : out_(path) {
        if (!out_) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
        out_ << header << '\n';
    }
    template <class... T>
    void row(T... values) {
        bool first = true;
        ((write(values, first)), ...);
        out_ << '\n';
    }

private:
    void write(double v, bool& first) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out_ << (first ? "" : ",") << buf;
        first = false;
    }
    void write(int v, bool& first) {
        out_ << (first ? "" : ",") << v;
        first = false;
    }
    std::ofstream out_;
};

/// JSON has no infinities; they are written as strings.
json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

json point(Point p) { return json::array({p.x, p.y}); }

class Certificates {
public:
    void at_most(const std::string& name, double value, double threshold) {
        add(name, value <= threshold, value, threshold);
    }
    void at_least(const std::string& name, double value, double threshold) {
        add(name, value >= threshold, value, threshold);
    }
    void finite(const std::string& name, double value) { add(name, std::isfinite(value), value, kInf); }
    void add(const std::string& name, bool passed, double value, double threshold) {
        list.push_back({name, passed, value, threshold});
    }
    std::vector<Certificate> list;
};

json polygon_json(const Polygon& P) {
    json j;
    j["vertices"] = json::array();
    j["normals"] = json::array();
    j["offsets"] = json::array();
    j["edge_lengths"] = json::array();
    for (std::size_t i = 0; i < P.size(); ++i) {
        j["vertices"].push_back(point(P.vertex(i)));
        j["normals"].push_back(point(P.normal(i)));
        j["offsets"].push_back(P.offset(i));
        j["edge_lengths"].push_back(P.edge_length(i));
    }
    return j;
}

json rhs_json(const ExperimentConfig& c, const RhsField& rhs) {
    json j;
    if (!c.rhs_expr.empty()) j["expr"] = c.rhs_expr;
    if (!c.rhs_table.empty()) j["table"] = c.rhs_table;
    j["a"] = rhs.a();
    j["A"] = rhs.A();
    j["alpha"] = rhs.alpha();
    j["holder_seminorm"] = rhs.holder_seminorm();
    j["smooth"] = rhs.smooth();
    return j;
}

json compatibility_json(const CompatibilityReport& r) {
    return {{"residuals", r.residuals}, {"required", r.required}, {"tolerance", r.tolerance},
            {"compatible", r.compatible}};
}

json weighted_json(const WeightedNormReport& w) {
    return {{"c0_alpha", w.c0_alpha},   {"weighted_grad", w.weighted_grad}, {"weighted_hess", w.weighted_hess},
            {"total", w.total},         {"sup_f", w.sup_f},                 {"semi_f", w.semi_f},
            {"sup_grad", w.sup_grad},   {"semi_grad", w.semi_grad},         {"sup_hess", w.sup_hess},
            {"semi_hess", w.semi_hess}, {"pairs", w.pairs}};
}

json located_json(const Located& l) {
    return {{"value", number(l.value)}, {"index", l.index}, {"point", point(l.point)}, {"a", l.a}, {"b", l.b}};
}

struct Context {
    const ExperimentConfig& config;
    std::filesystem::path out;
    Polygon polygon;
    RhsField rhs;
    std::vector<double> values;
    json report;
    Certificates certs;
};

Solution solve_level(Context& ctx, int level) {
    return solve(ctx.polygon, ctx.rhs, ctx.values, ctx.config.mesh_params(level), ctx.config.solver);
}

void add_solution(Context& ctx, const Solution& sol, bool write_field) {
    const Mesh& m = sol.mesh();
    ctx.report["mesh"] = {{"level", m.params().level},
                          {"grading", m.params().grading},
                          {"nodes", m.nx() * m.ny()},
                          {"unknowns", m.unknowns()},
                          {"fitted_stencils", m.fitted_stencils()},
                          {"grading_ratio", m.grading_ratio()}};
    ctx.report["solver"] = {{"converged", sol.converged},
                            {"iterations", sol.iterations},
                            {"residual", sol.residual_norm},
                            {"min_eigenvalue", sol.min_eigenvalue},
                            {"residual_history", sol.residual_history}};
    ctx.certs.at_most("newton_residual", sol.residual_norm, ctx.config.solver.tol);
    ctx.certs.add("hessian_spd", sol.min_eigenvalue > 0.0, sol.min_eigenvalue, 0.0);
    const ScalarField2D v = v_field(sol);
    ctx.report["weighted_norms"] = weighted_json(weighted_holder_norm(ctx.polygon, v, ctx.rhs.alpha()));
    if (!write_field) return;
    Csv csv(ctx.out / "field.csv", "x1,x2,v,u,u11,u12,u22");
    for (std::size_t k = 0; k < m.unknowns(); ++k) {
        const auto [i, j] = m.interior_ij(k);
        const Point x = m.interior_point(k);
        const Sym2 H = sol.discrete_hessian(k);
        csv.row(x.x, x.y, sol.node_v(i, j), u0_eval(ctx.polygon, x) + sol.node_v(i, j), H.xx, H.xy, H.yy);
    }
}

void add_boundary(Context& ctx, const BoundaryData& data) {
    json edges = json::array();
    for (std::size_t e = 0; e < ctx.polygon.size(); ++e) {
        const EdgeTrace& tr = data.trace(e);
        const EdgeProfile& pr = data.profile(e);
        edges.push_back({{"edge", e}, {"length", tr.length()}, {"h0", tr.h0()}, {"hL", tr.hL()},
                         {"c_prev", pr.c_prev}, {"c_next", pr.c_next}, {"u_mid", tr.value(0.5 * tr.length())}});
        Csv csv(ctx.out / ("boundary_edge" + std::to_string(e) + ".csv"), "t,u,v,h");
        for (std::size_t k = 0; k < tr.t().size(); ++k) {
            const double t = tr.t()[k];
            csv.row(t, tr.u()[k], data.v_trace(e, t), tr.h(t));
        }
    }
    ctx.report["boundary"] = edges;
}

void add_diagnostics(Context& ctx, const Solution& sol) {
    const DiagnosticsReport r = run_diagnostics(sol, ctx.config.diagnostics);
    json d;
    d["sup_D"] = located_json(r.sup_D);
    d["sup_E"] = located_json(r.sup_E);
    d["sup_D1"] = located_json(r.sup_D1);
    d["sup_D2"] = located_json(r.sup_D2);
    d["hessian_C"] = {{"value", number(r.hessian.C)},
                      {"node", r.hessian.arg},
                      {"point", point(r.hessian.point)},
                      {"indefinite", r.hessian.indefinite}};
    json decay = json::array();
    for (std::size_t e = 0; e < r.decay.size(); ++e) {
        const DecayTable& t = r.decay[e];
        decay.push_back({{"edge", e},
                         {"gamma", t.gamma},
                         {"tail_decreasing", t.tail_decreasing},
                         {"last_below_first", t.last_below_first}});
        Csv csv(ctx.out / ("decay_edge" + std::to_string(e) + ".csv"), "k,s,D,s^{1-gamma}D");
        for (const DecayRow& row : t.rows) csv.row(row.k, row.s, row.D, row.scaled);
        ctx.certs.add("decay_tail_edge" + std::to_string(e), t.tail_decreasing && t.last_below_first,
                      t.rows.back().scaled, t.rows.front().scaled);
    }
    d["decay"] = decay;
    d["section"] = {{"eps", r.section_eps}, {"C", r.section_C}, {"C_min", r.section_C_min}};
    d["rescaled"] = {{"D", r.rescaled.D},
                     {"lambda0", r.rescaled.lambda0},
                     {"C", r.rescaled.C},
                     {"A", r.rescaled.A},
                     {"at_origin", r.rescaled.at_origin},
                     {"at_base", r.rescaled.at_base},
                     {"margin_normal", r.rescaled.margin_normal},
                     {"margin_boundary", r.rescaled.margin_boundary}};
    d["convexity_modulus"] = {
        {"delta", ctx.config.diagnostics.delta}, {"M", r.modulus.M}, {"p", point(r.modulus.p)}, {"x", point(r.modulus.x)}};
    d["delta_integral"] = {{"value", r.delta_value}, {"quadrature", r.delta_quadrature}};
    if (r.scaling_ok)
        d["vertex_scaling"] = {
            {"lambda", r.scaling.lambda}, {"zeta", r.scaling.zeta}, {"ratio", r.scaling.ratio}, {"integral", r.scaling.integral}};
    ctx.report["diagnostics"] = d;

    ctx.certs.finite("sup_D_finite", r.sup_D.value);
    ctx.certs.finite("sup_E_finite", r.sup_E.value);
    ctx.certs.finite("sup_D1_finite", r.sup_D1.value);
    ctx.certs.finite("sup_D2_finite", r.sup_D2.value);
    ctx.certs.add("hessian_C_finite", std::isfinite(r.hessian.C) && r.hessian.C >= 1.0, r.hessian.C, kInf);
    ctx.certs.at_least("convexity_modulus_positive", r.modulus.M, 0.0);
    // Inclusion at half the measured constant on the middle ladder value.
    const double eps = r.section_eps[r.section_eps.size() / 2];
    const double c = r.section_C[r.section_eps.size() / 2];
    const SectionExtent ext = section_extent(sol, ctx.polygon, 0, 0.5 * ctx.polygon.edge_length(0), eps, 0.5 * c * eps);
    ctx.certs.add("section_inclusion", ext.inclusion && c > 0.0, ext.s_min, 0.5 * eps);
    ctx.certs.at_least("rescaled_normal_margin", r.rescaled.margin_normal, -1e-9);
}

double keldysh_level(Context& ctx, const Solution& sol, bool write_csv, json& out) {
    const std::size_t edge = ctx.config.keldysh_edge;
    const LegendreStrip strip =
        default_strip(ctx.polygon, edge, sol.mesh().params().level, ctx.config.grading, ctx.config.keldysh_y_hi);
    const LegendreField lf = partial_legendre(sol, edge, strip);
    const KeldyshResidual r = keldysh_residual(lf, keldysh_coefficient(sol, edge), ctx.config.keldysh_y_floor);
    const RoundTrip rt = legendre_round_trip(lf, sol);
    out = {{"level", sol.mesh().params().level},
           {"sup", r.sup},
           {"arg", {{"p", lf.p[r.arg_col]}, {"y", lf.y[r.arg_row]}}},
           {"evaluated", r.evaluated},
           {"nonpositive_coefficient", r.nonpositive_coefficient},
           {"round_trip", rt.max_error},
           {"p_range", {lf.p.front(), lf.p.back()}},
           {"rows", lf.ny()}};
    if (write_csv) {
        Csv csv(ctx.out / "keldysh.csv", "p,y,ustar,residual");
        for (std::size_t j = 0; j < lf.ny(); ++j)
            for (std::size_t k = 0; k < lf.np(); ++k)
                csv.row(lf.p[k], lf.y[j], lf.ustar_at(j, k), r.residual[j * lf.np() + k]);
    }
    ctx.certs.at_most("keldysh_round_trip_L" + std::to_string(sol.mesh().params().level), rt.max_error, 1e-6);
    ctx.certs.at_most("keldysh_coefficient_nonpositive_L" + std::to_string(sol.mesh().params().level),
                      static_cast<double>(r.nonpositive_coefficient), 0.0);
    return r.sup;
}

void add_keldysh(Context& ctx, const Solution& finest) {
    json levels = json::array();
    std::vector<double> sups;
    const auto& L = ctx.config.mesh_levels;
    for (std::size_t q = 0; q < L.size(); ++q) {
        json entry;
        if (q + 1 == L.size()) {
            sups.push_back(keldysh_level(ctx, finest, true, entry));
        } else {
            const Solution s = solve_level(ctx, L[q]);
            sups.push_back(keldysh_level(ctx, s, false, entry));
        }
        levels.push_back(entry);
    }
    json k;
    k["levels"] = levels;
    if (sups.size() >= 2) {
        double worst = 0.0;
        json ratios = json::array();
        for (std::size_t q = 1; q < sups.size(); ++q) {
            // Per halving of the mesh width.
            const double ratio = std::pow(sups[q] / sups[q - 1], 1.0 / (L[q] - L[q - 1]));
            ratios.push_back(ratio);
            worst = std::max(worst, ratio);
        }
        k["ratios"] = ratios;
        ctx.certs.at_most("keldysh_refinement_ratio", worst, 0.6);
    }
    ctx.report["keldysh"] = k;
}

void add_barrier(Context& ctx, const Solution& sol) {
    const std::size_t v = ctx.config.barrier_vertex;
    json list = json::array();
    const std::pair<BarrierSide, const char*> sides[] = {{BarrierSide::Upper, "upper"}, {BarrierSide::Lower, "lower"}};
    const std::pair<BarrierOrientation, const char*> orients[] = {{BarrierOrientation::AlongEdge, "edge"},
                                                                 {BarrierOrientation::Swapped, "swapped"}};
    for (const auto& [side, sname] : sides)
        for (const auto& [orient, oname] : orients) {
            const Barrier b = build_barrier(sol, v, side, orient);
            const BarrierMargin m = verify_barrier(sol, b);
            const std::string name = std::string("barrier_") + sname + "_" + oname;
            list.push_back({{"name", name},
                            {"A", b.A},
                            {"B", b.B},
                            {"r", b.r},
                            {"candidates", std::vector<double>(b.candidates, b.candidates + 4)},
                            {"v_sup", b.v_sup},
                            {"dv_near", b.dv_near},
                            {"dv_far", b.dv_far},
                            {"convex", b.convex},
                            {"min_margin", m.min_margin},
                            {"argmin", {m.y1, m.y2}},
                            {"trace_side", m.trace_side}});
            ctx.certs.at_least(name, m.min_margin, -ctx.config.barrier_tol);
        }
    const CornerRhs corner = self_consistent_corner_rhs(ctx.polygon, ctx.rhs, v);
    const LipschitzConstants lc = lipschitz_check(sol, ctx.polygon, v, corner.R);
    ctx.report["barrier"] = {{"vertex", v},
                             {"corner", {{"R", corner.R}, {"a", corner.a}, {"A", corner.A},
                                         {"seminorm", corner.seminorm}, {"holder_norm", corner.holder_norm}}},
                             {"barriers", list},
                             {"lipschitz", {{"normal2", lc.normal2}, {"normal1", lc.normal1}}}};
    ctx.certs.finite("lipschitz_finite", std::max(lc.normal1, lc.normal2));
}

void add_convergence(Context& ctx) {
    json rows = json::array();
    Csv csv(ctx.out / "convergence.csv", "level,unknowns,sup_D,sup_E,sup_D1,sup_D2,hessian_C,residual");
    std::vector<std::array<double, 4>> sups;
    for (int level : ctx.config.mesh_levels) {
        const Solution s = solve_level(ctx, level);
        const DiagnosticsReport r = run_diagnostics(s, ctx.config.diagnostics);
        sups.push_back({r.sup_D.value, r.sup_E.value, r.sup_D1.value, r.hessian.C});
        rows.push_back({{"level", level},
                        {"sup_D", number(r.sup_D.value)},
                        {"sup_E", number(r.sup_E.value)},
                        {"sup_D1", number(r.sup_D1.value)},
                        {"sup_D2", number(r.sup_D2.value)},
                        {"hessian_C", number(r.hessian.C)},
                        {"residual", s.residual_norm}});
        csv.row(level, static_cast<double>(s.mesh().unknowns()), r.sup_D.value, r.sup_E.value, r.sup_D1.value,
                r.sup_D2.value, r.hessian.C, s.residual_norm);
    }
    ctx.report["convergence"] = rows;
    if (sups.size() >= 2) {
        const auto& a = sups[sups.size() - 2];
        const auto& b = sups.back();
        const char* names[] = {"mesh_stability_D", "mesh_stability_E", "mesh_stability_D1", "mesh_stability_C"};
        for (int q = 0; q < 4; ++q) ctx.certs.at_most(names[q], std::abs(b[q] - a[q]) / std::abs(b[q]), 0.05);
    }
}

void add_approx(Context& ctx) {
    const ApproximationStudy st =
        approximation_study(ctx.polygon, ctx.rhs, ctx.values, ctx.config.mesh_params(ctx.config.approx_mesh_level),
                            ctx.config.solver, ctx.config.approx_levels, ctx.config.approx_first_width);
    json rows = json::array();
    Csv csv(ctx.out / "approx.csv", "n,width,c1_alpha_diff");
    for (const ApproximationRow& r : st.table) {
        rows.push_back({{"n", r.n}, {"width", r.width}, {"difference", r.difference}});
        csv.row(r.n, r.width, r.difference);
    }
    ctx.report["approximation"] = {{"widths", st.widths}, {"corrections", st.corrections}, {"table", rows},
                                   {"nonincreasing", st.nonincreasing}};
    if (st.table.size() >= 2)
        ctx.certs.add("approx_nonincreasing", st.nonincreasing, st.table.back().difference, st.table.front().difference);
}

/// Biweight convolution of H, extended outside the polygon by the sequential clamp onto each edge
/// line, on a grid of spacing width/8 covering the bounding box. Separable discrete convolution,
/// then a C^1 Catmull-Rom bicubic between grid nodes.
class SmoothedGrid {
public:
    static constexpr int kTaps = 8;

    SmoothedGrid(const Polygon& polygon, const RhsField& rhs, double width) {
        const double d = width / kTaps;
        lo_ = polygon.lower_corner();
        const Point hi = polygon.upper_corner();
        d_ = d;
        nx_ = static_cast<std::size_t>(std::ceil((hi.x - lo_.x) / d)) + 1;
        ny_ = static_cast<std::size_t>(std::ceil((hi.y - lo_.y) / d)) + 1;

        std::array<double, 2 * kTaps + 1> k{};
        double total = 0.0;
        for (int q = -kTaps; q <= kTaps; ++q) {
            const double z = static_cast<double>(q) / kTaps;
            k[q + kTaps] = (1 - z * z) * (1 - z * z);
            total += k[q + kTaps];
        }
        for (double& w : k) w /= total;

        // Samples on the grid padded by kTaps nodes on every side.
        const std::size_t px = nx_ + 2 * kTaps;
        const std::size_t py = ny_ + 2 * kTaps;
        std::vector<double> raw(px * py);
        for (std::size_t j = 0; j < py; ++j)
            for (std::size_t i = 0; i < px; ++i) {
                Point y{lo_.x + (static_cast<double>(i) - kTaps) * d, lo_.y + (static_cast<double>(j) - kTaps) * d};
                for (int pass = 0; pass < 2; ++pass)
                    for (std::size_t e = 0; e < polygon.size(); ++e) {
                        const double l = polygon.l(e, y);
                        if (l < 0.0) y = y - polygon.normal(e) * l;
                    }
                raw[j * px + i] = rhs(y);
            }
        std::vector<double> rows(px * ny_);
        for (std::size_t j = 0; j < ny_; ++j)
            for (std::size_t i = 0; i < px; ++i) {
                double s = 0.0;
                for (int q = 0; q <= 2 * kTaps; ++q) s += k[q] * raw[(j + q) * px + i];
                rows[j * px + i] = s;
            }
        values_.resize(nx_ * ny_);
        for (std::size_t j = 0; j < ny_; ++j)
            for (std::size_t i = 0; i < nx_; ++i) {
                double s = 0.0;
                for (int q = 0; q <= 2 * kTaps; ++q) s += k[q] * rows[j * px + i + q];
                values_[j * nx_ + i] = s;
            }
    }

    double operator()(Point x) const {
        const auto axis = [this](double u, std::size_t n, std::size_t& c, double& f) {
            const double s = std::clamp(u / d_, 0.0, static_cast<double>(n - 1));
            c = std::min(static_cast<std::size_t>(s), n - 2);
            f = s - static_cast<double>(c);
        };
        std::size_t ci = 0;
        std::size_t cj = 0;
        double fx = 0.0;
        double fy = 0.0;
        axis(x.x - lo_.x, nx_, ci, fx);
        axis(x.y - lo_.y, ny_, cj, fy);
        const auto wx = catmull_rom(fx);
        const auto wy = catmull_rom(fy);
        double s = 0.0;
        for (int b = 0; b < 4; ++b) {
            const std::size_t j = clamp_index(static_cast<std::ptrdiff_t>(cj) + b - 1, ny_);
            double r = 0.0;
            for (int a = 0; a < 4; ++a)
                r += wx[a] * values_[j * nx_ + clamp_index(static_cast<std::ptrdiff_t>(ci) + a - 1, nx_)];
            s += wy[b] * r;
        }
        return s;
    }

private:
    static std::array<double, 4> catmull_rom(double t) {
        const double t2 = t * t;
        const double t3 = t2 * t;
        return {0.5 * (-t3 + 2 * t2 - t), 0.5 * (3 * t3 - 5 * t2 + 2), 0.5 * (-3 * t3 + 4 * t2 + t), 0.5 * (t3 - t2)};
    }
    static std::size_t clamp_index(std::ptrdiff_t i, std::size_t n) {
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(n) - 1));
    }

    Point lo_;
    double d_ = 0.0;
    std::size_t nx_ = 0;
    std::size_t ny_ = 0;
    std::vector<double> values_;
};

}  // namespace

Command parse_command(std::string_view name) {
    static const std::pair<std::string_view, Command> table[] = {
        {"solve", Command::Solve},     {"boundary", Command::Boundary}, {"diagnose", Command::Diagnose},
        {"keldysh", Command::Keldysh}, {"barrier", Command::Barrier},   {"approx", Command::Approx},
        {"convergence", Command::Convergence}, {"run", Command::Run}};
    for (const auto& [n, c] : table)
        if (n == name) return c;
    throw Error(ErrorKind::ConfigError, "unknown command " + std::string(name));
}

std::string_view command_name(Command command) {
    switch (command) {
    case Command::Solve: return "solve";
    case Command::Boundary: return "boundary";
    case Command::Diagnose: return "diagnose";
    case Command::Keldysh: return "keldysh";
    case Command::Barrier: return "barrier";
    case Command::Approx: return "approx";
    case Command::Convergence: return "convergence";
    case Command::Run: return "run";
    }
    return "unknown";
}

int exit_code_for(const Error& error) {
    switch (error.kind()) {
    case ErrorKind::IncompatibleH:
    case ErrorKind::CompatibilityLost: return ExitIncompatible;
    case ErrorKind::ConfigError:
    case ErrorKind::CollinearVertices:
    case ErrorKind::NonConvex:
    case ErrorKind::WrongOrientation:
    case ErrorKind::TooFewVertices:
    case ErrorKind::NonPositiveH: return ExitConfig;
    default: return ExitFailure;
    }
}

ScalarField2D v_field(const Solution& sol) {
    const Mesh& m = sol.mesh();
    ScalarField2D f;
    f.resize(m.xs(), m.ys());
    for (std::size_t k = 0; k < m.unknowns(); ++k) {
        const auto [i, j] = m.interior_ij(k);
        const std::size_t g = f.index(i, j);
        f.valid[g] = 1;
        f.value[g] = sol.node_v(i, j);
        f.grad[g] = sol.node_grad(i, j);
        f.hess[g] = sol.node_hess(i, j);
    }
    return f;
}

RhsField mollify_and_pin(const Polygon& polygon, const RhsField& rhs, double width, double* max_correction) {
    if (!(width > 0.0)) throw Error(ErrorKind::ConfigError, "mollifier width must be positive");
    const std::shared_ptr<const SmoothedGrid> grid = std::make_shared<const SmoothedGrid>(polygon, rhs, width);
    const Polygon P = polygon;

    const std::size_t N = polygon.size();
    std::vector<double> corr(N);
    std::vector<double> norm_at(N);
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        corr[i] = compatible_vertex_value(polygon, i) - (*grid)(polygon.vertex(i));
        norm_at[i] = polygon.product_l_except(polygon.vertex(i), polygon.prev(i), i);
        worst = std::max(worst, std::abs(corr[i]));
    }
    if (max_correction) *max_correction = worst;
    if (worst > 0.5 * rhs.a())
        throw Error(ErrorKind::CompatibilityLost, "vertex re-pinning exceeds half the lower bound of H");
    RhsField::Evaluator pinned = [P, grid, corr, norm_at](Point x) {
        double s = (*grid)(x);
        for (std::size_t i = 0; i < P.size(); ++i) s += corr[i] * P.product_l_except(x, P.prev(i), i) / norm_at[i];
        return s;
    };
    const SampledRange range = sample_range(polygon, pinned, 32);
    if (!(range.min > 0.0)) throw Error(ErrorKind::CompatibilityLost, "re-pinned H is not positive");
    return RhsField(pinned, range.min, range.max, rhs.alpha(), rhs.holder_seminorm(), true);
}

ApproximationStudy approximation_study(const Polygon& polygon, const RhsField& rhs,
                                       const std::vector<double>& vertex_values, const MeshParams& mesh_params,
                                       const SolverParams& params, int levels, int first_width) {
    ApproximationStudy st;
    const auto mesh = std::make_shared<const Mesh>(Mesh::build(polygon, mesh_params));
    std::vector<ScalarField2D> fields;
    for (int n = 0; n < levels; ++n) {
        const double width = std::ldexp(1.0, -(first_width + n));
        st.widths.push_back(width);
        double correction = 0.0;
        const RhsField Hn = rhs.smooth() ? rhs : mollify_and_pin(polygon, rhs, width, &correction);
        st.corrections.push_back(correction);
        BoundaryData data = BoundaryData::assemble(polygon, Hn, vertex_values, params.compat_tol);
        fields.push_back(v_field(solve_on_mesh(mesh, std::move(data), Hn, params)));
    }
    for (std::size_t n = 0; n + 1 < fields.size(); ++n) {
        ScalarField2D d = fields[n + 1];
        for (std::size_t g = 0; g < d.value.size(); ++g) {
            d.value[g] -= fields[n].value[g];
            d.grad[g] = d.grad[g] - fields[n].grad[g];
            d.hess[g] = d.hess[g] - fields[n].hess[g];
        }
        ApproximationRow row;
        row.n = static_cast<int>(n);
        row.width = st.widths[n + 1];
        row.difference = c1_alpha_norm(d, rhs.alpha());
        if (!st.table.empty() && row.difference > st.table.back().difference + 1e-14) st.nonincreasing = false;
        st.table.push_back(row);
    }
    return st;
}

RunResult run_experiment(Command command, const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const Polygon polygon = make_polygon(config);
    Context ctx{config, out_dir, polygon, make_rhs(config, polygon), vertex_values(config, polygon), json::object(), {}};
    ctx.report["command"] = command_name(command);
    ctx.report["polygon"] = polygon_json(polygon);
    ctx.report["rhs"] = rhs_json(config, ctx.rhs);
    ctx.report["vertex_values"] = ctx.values;

    RunResult result;
    const CompatibilityReport compat = check_compatibility(polygon, ctx.rhs, config.solver.compat_tol);
    ctx.report["compatibility"] = compatibility_json(compat);
    double worst = 0.0;
    for (double r : compat.residuals) worst = std::max(worst, std::abs(r));
    ctx.certs.at_most("compatibility", worst, compat.tolerance);

    if (!compat.compatible) {
        result.exit_code = ExitIncompatible;
    } else {
        switch (command) {
        case Command::Boundary:
            add_boundary(ctx, BoundaryData::assemble(polygon, ctx.rhs, ctx.values, config.solver.compat_tol));
            break;
        case Command::Approx: add_approx(ctx); break;
        case Command::Convergence: add_convergence(ctx); break;
        default: {
            const Solution sol = solve_level(ctx, config.finest_level());
            add_solution(ctx, sol, command == Command::Solve || command == Command::Run);
            if (command == Command::Diagnose || command == Command::Run) add_diagnostics(ctx, sol);
            if (command == Command::Keldysh || command == Command::Run) add_keldysh(ctx, sol);
            if (command == Command::Barrier || command == Command::Run) add_barrier(ctx, sol);
            break;
        }
        }
        for (const Certificate& c : ctx.certs.list)
            if (!c.passed) result.exit_code = ExitFailure;
    }

    json certs = json::array();
    for (const Certificate& c : ctx.certs.list)
        certs.push_back({{"name", c.name}, {"passed", c.passed}, {"value", number(c.value)},
                         {"threshold", number(c.threshold)}});
    ctx.report["certificates"] = certs;
    ctx.report["exit_code"] = result.exit_code;
    std::ofstream(out_dir / "report.json") << ctx.report.dump(2) << '\n';
    result.report = std::move(ctx.report);
    result.certificates = std::move(ctx.certs.list);
    return result;
}

}  // namespace toricma
