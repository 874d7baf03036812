#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "toricma/config.hpp"
#include "toricma/experiment.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    std::optional<int> mesh_level;
    std::optional<double> tol;
};

int run(toricma::Command command, const Options& opt) {
    using namespace toricma;
    try {
        ExperimentConfig config = load_config(opt.config);
        if (opt.mesh_level) {
            if (*opt.mesh_level < 2 || *opt.mesh_level > 11)
                throw Error(ErrorKind::ConfigError, "--mesh-level must lie in [2, 11]");
            config.mesh_levels = {*opt.mesh_level};
        }
        if (opt.tol) {
            if (!(*opt.tol > 0.0)) throw Error(ErrorKind::ConfigError, "--tol must be positive");
            config.solver.tol = *opt.tol;
        }
        std::filesystem::path out = opt.out.empty() ? std::filesystem::path(config.output_dir) : std::filesystem::path(opt.out);
        if (out.is_relative() && opt.out.empty()) out = config.base_dir / out;
        const RunResult r = run_experiment(command, config, out);
        for (const Certificate& c : r.certificates)
            std::printf("%-40s %s  value=%.6g threshold=%.6g\n", c.name.c_str(), c.passed ? "PASS" : "FAIL", c.value,
                        c.threshold);
        if (r.exit_code == ExitIncompatible) {
            const auto& res = r.report["compatibility"]["residuals"];
            for (std::size_t i = 0; i < res.size(); ++i)
                std::fprintf(stderr, "incompatible H: vertex %zu residual %.3f\n", i, res[i].get<double>());
        }
        std::printf("report: %s\n", (out / "report.json").string().c_str());
        return r.exit_code;
    } catch (const Error& e) {
        std::fprintf(stderr, "error (%s): %s\n", std::string(to_string(e.kind())).c_str(), e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return ExitFailure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Singular Monge-Ampere solver on convex polygons with Guillemin boundary conditions"};
    app.require_subcommand(1);
    Options opt;
    toricma::Command command = toricma::Command::Run;
    const char* names[] = {"solve", "boundary", "diagnose", "keldysh", "barrier", "approx", "convergence", "run"};
    const char* help[] = {"Solve and dump the nodal field",
                          "Edge ODE traces per edge",
                          "Solve and evaluate the diagnostics",
                          "Partial Legendre transform and Keldysh residual",
                          "Corner barriers and Lipschitz constants",
                          "Mollified right-hand side approximation study",
                          "Diagnostics over every configured mesh level",
                          "solve, diagnose, keldysh and barrier in one pass"};
    for (int k = 0; k < 8; ++k) {
        CLI::App* sub = app.add_subcommand(names[k], help[k]);
        sub->add_option("--config", opt.config, "Experiment config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "Output directory (default: output.dir of the config)");
        sub->add_option("--mesh-level", opt.mesh_level, "Single mesh level, replacing mesh.levels");
        sub->add_option("--tol", opt.tol, "Newton tolerance, replacing solver.tol");
        sub->callback([&command, k, &names] { command = toricma::parse_command(names[k]); });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : toricma::ExitConfig;
    }
    return run(command, opt);
}
