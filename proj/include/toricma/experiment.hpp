#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "toricma/config.hpp"
#include "toricma/error.hpp"
#include "toricma/solver.hpp"
#include "toricma/weighted_norm.hpp"

namespace toricma {

enum class Command { Solve, Boundary, Diagnose, Keldysh, Barrier, Approx, Convergence, Run };

/// Throws Error(ConfigError) for an unknown name.
Command parse_command(std::string_view name);
std::string_view command_name(Command command);

/// A predicate that was evaluated: passed iff value satisfies the stated threshold.
struct Certificate {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
};

enum ExitCode { ExitSuccess = 0, ExitFailure = 1, ExitIncompatible = 2, ExitConfig = 3 };

struct RunResult {
    int exit_code = ExitSuccess;
    nlohmann::json report;
    std::vector<Certificate> certificates;
};

/// Runs a subcommand, writing report.json and the command's CSV files into out_dir.
/// Library errors propagate; the CLI maps them to exit codes with exit_code_for.
RunResult run_experiment(Command command, const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Exit code for a library error kind.
int exit_code_for(const Error& error);

/// v = u - u0 with nodal derivatives at interior mesh nodes.
ScalarField2D v_field(const Solution& sol);

/// H convolved with a separable biweight kernel of the given half-width on a padded grid of
/// spacing width/8 (H sampled through a clamp onto the polygon), then re-pinned to the compatible vertex
/// values by the bumps prod_{j != i-1, i} l_j normalised at v_i. Throws CompatibilityLost when a
/// correction exceeds a/2.
RhsField mollify_and_pin(const Polygon& polygon, const RhsField& rhs, double width, double* max_correction = nullptr);

struct ApproximationRow {
    int n = 0;
    double width = 0.0;
    /// ||v_{n+1} - v_n|| in the C^{1,alpha} estimator.
    double difference = 0.0;
};

struct ApproximationStudy {
    std::vector<double> widths;
    std::vector<double> corrections;
    std::vector<ApproximationRow> table;
    bool nonincreasing = true;
};

/// Solves with H_n for widths 2^{-(first_width + n)}, n < levels, on one mesh. Smooth H is used as is.
ApproximationStudy approximation_study(const Polygon& polygon, const RhsField& rhs,
                                       const std::vector<double>& vertex_values, const MeshParams& mesh,
                                       const SolverParams& params, int levels, int first_width);

}  // namespace toricma
