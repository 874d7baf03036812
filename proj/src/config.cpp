#include "toricma/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "toricma/error.hpp"
#include "toricma/expression.hpp"

namespace toricma {

namespace {

using json = nlohmann::json;

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw Error(ErrorKind::ConfigError, key + ": " + what);
}

struct Value {
    std::string key;
    std::string raw;
    json parsed;
    bool is_json = false;

    double number() const {
        if (!is_json || !parsed.is_number()) fail(key, "expected a number");
        return parsed.get<double>();
    }
    long integer() const {
        const double d = number();
        if (d != std::floor(d)) fail(key, "expected an integer");
        return static_cast<long>(d);
    }
    std::size_t index() const {
        const long v = integer();
        if (v < 0) fail(key, "expected a non-negative index");
        return static_cast<std::size_t>(v);
    }
    bool boolean() const {
        if (!is_json || !parsed.is_boolean()) fail(key, "expected true or false");
        return parsed.get<bool>();
    }
    std::string text() const { return is_json && parsed.is_string() ? parsed.get<std::string>() : raw; }
    std::vector<double> numbers() const {
        if (!is_json) fail(key, "expected a list of numbers");
        if (parsed.is_number()) return {parsed.get<double>()};
        if (!parsed.is_array()) fail(key, "expected a list of numbers");
        std::vector<double> out;
        for (const json& v : parsed) {
            if (!v.is_number()) fail(key, "expected a list of numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
};

using Setter = std::function<void(ExperimentConfig&, const Value&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"polygon.vertices",
         [](ExperimentConfig& c, const Value& v) {
             if (!v.is_json || !v.parsed.is_array()) fail(v.key, "expected [[x1, x2], ...]");
             c.vertices.clear();
             for (const json& p : v.parsed) {
                 if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                     fail(v.key, "expected [[x1, x2], ...]");
                 c.vertices.push_back({p[0].get<double>(), p[1].get<double>()});
             }
         }},
        {"rhs.expr", [](ExperimentConfig& c, const Value& v) { c.rhs_expr = v.text(); }},
        {"rhs.table", [](ExperimentConfig& c, const Value& v) { c.rhs_table = v.text(); }},
        {"rhs.a", [](ExperimentConfig& c, const Value& v) { c.rhs_a = v.number(); }},
        {"rhs.A", [](ExperimentConfig& c, const Value& v) { c.rhs_A = v.number(); }},
        {"rhs.alpha", [](ExperimentConfig& c, const Value& v) { c.alpha = v.number(); }},
        {"rhs.holder", [](ExperimentConfig& c, const Value& v) { c.rhs_holder = v.number(); }},
        {"rhs.smooth", [](ExperimentConfig& c, const Value& v) { c.rhs_smooth = v.boolean(); }},
        {"vertex_values", [](ExperimentConfig& c, const Value& v) { c.vertex_values = v.numbers(); }},
        {"mesh.levels",
         [](ExperimentConfig& c, const Value& v) {
             c.mesh_levels.clear();
             for (double d : v.numbers()) {
                 if (d != std::floor(d) || d < 2 || d > 11) fail(v.key, "levels must be integers in [2, 11]");
                 c.mesh_levels.push_back(static_cast<int>(d));
             }
             if (c.mesh_levels.empty()) fail(v.key, "at least one level is required");
             std::sort(c.mesh_levels.begin(), c.mesh_levels.end());
         }},
        {"mesh.grading", [](ExperimentConfig& c, const Value& v) { c.grading = v.number(); }},
        {"mesh.drop_fraction", [](ExperimentConfig& c, const Value& v) { c.drop_fraction = v.number(); }},
        {"solver.tol", [](ExperimentConfig& c, const Value& v) { c.solver.tol = v.number(); }},
        {"solver.max_iter", [](ExperimentConfig& c, const Value& v) { c.solver.max_iter = static_cast<int>(v.integer()); }},
        {"solver.damping_floor", [](ExperimentConfig& c, const Value& v) { c.solver.damping_floor = v.number(); }},
        {"solver.continuation_steps",
         [](ExperimentConfig& c, const Value& v) { c.solver.continuation_steps = static_cast<int>(v.integer()); }},
        {"compat.tol", [](ExperimentConfig& c, const Value& v) { c.solver.compat_tol = v.number(); }},
        {"diagnostics.gamma", [](ExperimentConfig& c, const Value& v) { c.diagnostics.gamma = v.number(); }},
        {"diagnostics.vertex_margin",
         [](ExperimentConfig& c, const Value& v) { c.diagnostics.vertex_margin_fraction = v.number(); }},
        {"diagnostics.t_points",
         [](ExperimentConfig& c, const Value& v) { c.diagnostics.t_points = static_cast<int>(v.integer()); }},
        {"diagnostics.kmin", [](ExperimentConfig& c, const Value& v) { c.diagnostics.kmin = static_cast<int>(v.integer()); }},
        {"diagnostics.kmax", [](ExperimentConfig& c, const Value& v) { c.diagnostics.kmax = static_cast<int>(v.integer()); }},
        {"diagnostics.delta", [](ExperimentConfig& c, const Value& v) { c.diagnostics.delta = v.number(); }},
        {"diagnostics.rescale_s0", [](ExperimentConfig& c, const Value& v) { c.diagnostics.rescale_s0 = v.number(); }},
        {"diagnostics.section_eps", [](ExperimentConfig& c, const Value& v) { c.diagnostics.section_eps = v.numbers(); }},
        {"keldysh.edge", [](ExperimentConfig& c, const Value& v) { c.keldysh_edge = v.index(); }},
        {"keldysh.y_hi", [](ExperimentConfig& c, const Value& v) { c.keldysh_y_hi = v.number(); }},
        {"keldysh.y_floor", [](ExperimentConfig& c, const Value& v) { c.keldysh_y_floor = v.number(); }},
        {"barrier.vertex", [](ExperimentConfig& c, const Value& v) { c.barrier_vertex = v.index(); }},
        {"barrier.tol", [](ExperimentConfig& c, const Value& v) { c.barrier_tol = v.number(); }},
        {"approx.levels", [](ExperimentConfig& c, const Value& v) { c.approx_levels = static_cast<int>(v.integer()); }},
        {"approx.first_width",
         [](ExperimentConfig& c, const Value& v) { c.approx_first_width = static_cast<int>(v.integer()); }},
        {"approx.mesh_level",
         [](ExperimentConfig& c, const Value& v) { c.approx_mesh_level = static_cast<int>(v.integer()); }},
        {"output.dir", [](ExperimentConfig& c, const Value& v) { c.output_dir = v.text(); }},
    };
    return table;
}

void validate(const ExperimentConfig& c) {
    if (c.vertices.size() < 3) fail("polygon.vertices", "at least three vertices are required");
    if (c.rhs_expr.empty() == c.rhs_table.empty()) fail("rhs", "give exactly one of rhs.expr and rhs.table");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) fail("rhs.alpha", "must lie in (0, 1)");
    if (c.rhs_a && !(*c.rhs_a > 0.0)) fail("rhs.a", "must be positive");
    if (c.rhs_a && c.rhs_A && *c.rhs_A < *c.rhs_a) fail("rhs.A", "must not be below rhs.a");
    if (!c.vertex_values.empty() && c.vertex_values.size() != c.vertices.size())
        fail("vertex_values", "needs one value per vertex");
    if (!(c.grading >= 0.0 && c.grading <= 1.0)) fail("mesh.grading", "must lie in [0, 1]");
    if (!(c.solver.tol > 0.0)) fail("solver.tol", "must be positive");
    if (c.solver.max_iter < 1) fail("solver.max_iter", "must be at least 1");
    if (!(c.solver.damping_floor > 0.0 && c.solver.damping_floor <= 1.0)) fail("solver.damping_floor", "must lie in (0, 1]");
    if (c.solver.continuation_steps < 0) fail("solver.continuation_steps", "must be non-negative");
    if (!(c.solver.compat_tol > 0.0)) fail("compat.tol", "must be positive");
    if (c.diagnostics.kmin < 1 || c.diagnostics.kmax < c.diagnostics.kmin || c.diagnostics.kmax > 30)
        fail("diagnostics.kmax", "ladder needs 1 <= kmin <= kmax <= 30");
    if (c.diagnostics.t_points < 2) fail("diagnostics.t_points", "must be at least 2");
    if (c.keldysh_edge >= c.vertices.size()) fail("keldysh.edge", "no such edge");
    if (c.barrier_vertex >= c.vertices.size()) fail("barrier.vertex", "no such vertex");
    if (c.approx_levels < 1) fail("approx.levels", "must be at least 1");
    if (c.approx_mesh_level < 2 || c.approx_mesh_level > 11) fail("approx.mesh_level", "must lie in [2, 11]");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    ExperimentConfig config;
    config.base_dir = base_dir;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) fail("line " + std::to_string(number), "expected key = value");
        Value v;
        v.key = trim(std::string_view(body).substr(0, eq));
        v.raw = trim(std::string_view(body).substr(eq + 1));
        if (v.raw.empty()) fail(v.key, "missing value");
        if (!seen.insert(v.key).second) fail(v.key, "duplicate key");
        v.parsed = json::parse(v.raw, nullptr, false);
        v.is_json = !v.parsed.is_discarded();
        const auto it = setters().find(v.key);
        if (it == setters().end()) fail(v.key, "unknown key");
        it->second(config, v);
    }
    validate(config);
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(path.string(), "cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.parent_path());
}

Polygon make_polygon(const ExperimentConfig& config) { return Polygon::from_vertices(config.vertices); }

RhsField::Evaluator load_rhs_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("rhs.table", "cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (trim(line) != "x1,x2,H") fail("rhs.table", "header must be x1,x2,H");
    std::map<std::pair<double, double>, double> samples;
    std::set<double> xs_set;
    std::set<double> ys_set;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        double x = 0.0, y = 0.0, h = 0.0;
        char c1 = 0, c2 = 0;
        std::istringstream row(line);
        if (!(row >> x >> c1 >> y >> c2 >> h) || c1 != ',' || c2 != ',') fail("rhs.table", "bad row: " + line);
        samples[{x, y}] = h;
        xs_set.insert(x);
        ys_set.insert(y);
    }
    std::vector<double> xs(xs_set.begin(), xs_set.end());
    std::vector<double> ys(ys_set.begin(), ys_set.end());
    if (xs.size() < 2 || ys.size() < 2 || samples.size() != xs.size() * ys.size())
        fail("rhs.table", "rows must form a full tensor grid");
    std::vector<double> values(xs.size() * ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j)
        for (std::size_t i = 0; i < xs.size(); ++i) values[j * xs.size() + i] = samples.at({xs[i], ys[j]});
    return [xs, ys, values](Point p) {
        auto cell = [](const std::vector<double>& axis, double v, double& s) {
            v = std::clamp(v, axis.front(), axis.back());
            std::size_t k = static_cast<std::size_t>(std::upper_bound(axis.begin(), axis.end(), v) - axis.begin());
            k = std::clamp<std::size_t>(k, 1, axis.size() - 1) - 1;
            s = (v - axis[k]) / (axis[k + 1] - axis[k]);
            return k;
        };
        double s = 0.0, t = 0.0;
        const std::size_t i = cell(xs, p.x, s);
        const std::size_t j = cell(ys, p.y, t);
        const std::size_t n = xs.size();
        return (1 - s) * (1 - t) * values[j * n + i] + s * (1 - t) * values[j * n + i + 1] +
               (1 - s) * t * values[(j + 1) * n + i] + s * t * values[(j + 1) * n + i + 1];
    };
}

RhsField make_rhs(const ExperimentConfig& config, const Polygon& polygon) {
    RhsField::Evaluator f;
    bool smooth = false;
    if (!config.rhs_expr.empty()) {
        const Expression expr = Expression::parse(config.rhs_expr);
        if (expr.max_edge_index() > static_cast<int>(polygon.size()))
            fail("rhs.expr", "refers to an edge the polygon does not have");
        const Polygon P = polygon;
        f = [expr, P](Point x) { return expr.evaluate(x, &P); };
        smooth = expr.is_smooth();
    } else {
        f = load_rhs_table(config.base_dir / config.rhs_table);
    }
    if (config.rhs_smooth) smooth = *config.rhs_smooth;
    const SampledRange range = sample_range(polygon, f);
    if (!(range.min > 0.0)) throw Error(ErrorKind::NonPositiveH, "H must be positive on the closed polygon");
    const double a = config.rhs_a.value_or(range.min);
    const double A = config.rhs_A.value_or(range.max);
    const double semi =
        config.rhs_holder ? *config.rhs_holder : estimate_holder_seminorm(polygon, f, config.alpha);
    RhsField rhs(f, a, A, config.alpha, semi, smooth);
    validate_rhs(polygon, rhs);
    return rhs;
}

std::vector<double> vertex_values(const ExperimentConfig& config, const Polygon& polygon) {
    if (config.vertex_values.empty()) return std::vector<double>(polygon.size(), 0.0);
    if (config.vertex_values.size() != polygon.size()) fail("vertex_values", "needs one value per vertex");
    return config.vertex_values;
}

}  // namespace toricma
