#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toricma/diagnostics.hpp"
#include "toricma/mesh.hpp"
#include "toricma/polygon.hpp"
#include "toricma/rhs.hpp"
#include "toricma/solver.hpp"

namespace toricma {

/// Flat `key = value` experiment description; values are JSON literals or bare strings.
/// See docs/config.md for the keys.
struct ExperimentConfig {
    std::vector<Point> vertices;

    std::string rhs_expr;
    /// CSV with columns x1,x2,H on a tensor grid, relative to the config file.
    std::string rhs_table;
    std::optional<double> rhs_a;
    std::optional<double> rhs_A;
    double alpha = 0.5;
    std::optional<double> rhs_holder;
    std::optional<bool> rhs_smooth;

    /// Empty means zero at every vertex.
    std::vector<double> vertex_values;

    /// Solves use the last (finest) level; convergence studies use all of them.
    std::vector<int> mesh_levels{7};
    double grading = 1.0;
    double drop_fraction = 0.25;

    SolverParams solver;
    DiagnosticsParams diagnostics;

    std::size_t keldysh_edge = 0;
    double keldysh_y_hi = 0.25;
    double keldysh_y_floor = 1e-3;

    std::size_t barrier_vertex = 0;
    double barrier_tol = 1e-6;

    int approx_levels = 4;
    int approx_first_width = 3;
    int approx_mesh_level = 6;

    std::string output_dir = "out";
    std::filesystem::path base_dir;

    int finest_level() const { return mesh_levels.back(); }
    MeshParams mesh_params(int level) const { return {level, grading, drop_fraction}; }
};

/// Throws Error(ConfigError) with the offending key or line.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

Polygon make_polygon(const ExperimentConfig& config);
/// H from the expression or table; bounds, Holder seminorm and smoothness are sampled unless given.
RhsField make_rhs(const ExperimentConfig& config, const Polygon& polygon);
/// Vertex values padded to the polygon size (ConfigError on a length mismatch).
std::vector<double> vertex_values(const ExperimentConfig& config, const Polygon& polygon);

/// Bilinear interpolant of a CSV grid x1,x2,H; points outside the grid are clamped to it.
RhsField::Evaluator load_rhs_table(const std::filesystem::path& path);

}  // namespace toricma
