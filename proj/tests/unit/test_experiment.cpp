#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "support/fixtures.hpp"
#include "toricma/config.hpp"
#include "toricma/error.hpp"
#include "toricma/experiment.hpp"

using namespace toricma;
namespace fs = std::filesystem;

namespace {

const char* kSquare = "polygon.vertices = [[0, 0], [1, 0], [1, 1], [0, 1]]\n";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("toricma_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

ErrorKind config_error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::CollinearVertices;
}

/// Exit status of the CLI, or -1 when the binary is not available.
int run_cli(const std::string& args) {
    const char* cli = std::getenv("TORICMA_CLI");
    if (cli == nullptr) return -1;
    const std::string cmd = std::string("\"") + cli + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
    const ExperimentConfig c = parse_config(std::string(kSquare) +
                                            "# comment line\n"
                                            "rhs.expr = 1 + 0*x1   # trailing comment\n"
                                            "mesh.levels = [7, 5, 6]\n"
                                            "solver.tol = 1e-9\n"
                                            "output.dir = out/x\n");
    CHECK(c.vertices.size() == 4);
    CHECK(c.rhs_expr == "1 + 0*x1");
    CHECK(c.mesh_levels == std::vector<int>{5, 6, 7});
    CHECK(c.finest_level() == 7);
    CHECK(c.solver.tol == 1e-9);
    CHECK(c.output_dir == "out/x");
    CHECK(c.alpha == 0.5);
    CHECK(vertex_values(c, make_polygon(c)) == std::vector<double>{0, 0, 0, 0});

    CHECK(config_error_of(std::string(kSquare) + "rhs.expr = 1\nmesh.level = 5\n") == ErrorKind::ConfigError);
    CHECK(config_error_of(std::string(kSquare) + "rhs.expr = 1\nrhs.expr = 2\n") == ErrorKind::ConfigError);
    CHECK(config_error_of(std::string(kSquare) + "rhs.expr 1\n") == ErrorKind::ConfigError);
    CHECK(config_error_of(std::string(kSquare) + "rhs.expr = 1\nmesh.levels = [12]\n") == ErrorKind::ConfigError);
    CHECK(config_error_of(std::string(kSquare) + "rhs.expr = 1\nrhs.alpha = 1.5\n") == ErrorKind::ConfigError);
    CHECK(config_error_of(std::string(kSquare) + "rhs.expr = 1\nbarrier.vertex = 4\n") == ErrorKind::ConfigError);
    CHECK(config_error_of("rhs.expr = 1\n") == ErrorKind::ConfigError);
    try {
        parse_config(std::string(kSquare) + "rhs.expr = 1\nsolver.tolerance = 1\n");
        FAIL("accepted an unknown key");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("solver.tolerance") != std::string::npos);
    }
    CHECK(config_error_of(std::string(kSquare) + "rhs.expr = 1\nvertex_values = [1, 2]\n") == ErrorKind::ConfigError);
}

TEST_CASE("commands and exit codes") {
    for (Command c : {Command::Solve, Command::Boundary, Command::Diagnose, Command::Keldysh, Command::Barrier,
                      Command::Approx, Command::Convergence, Command::Run})
        CHECK(parse_command(command_name(c)) == c);
    CHECK_THROWS_AS(parse_command("solver"), Error);
    CHECK(exit_code_for(Error(ErrorKind::IncompatibleH, "x")) == ExitIncompatible);
    CHECK(exit_code_for(Error(ErrorKind::CompatibilityLost, "x")) == ExitIncompatible);
    CHECK(exit_code_for(Error(ErrorKind::ConfigError, "x")) == ExitConfig);
    CHECK(exit_code_for(Error(ErrorKind::NonConvex, "x")) == ExitConfig);
    CHECK(exit_code_for(Error(ErrorKind::NonPositiveH, "x")) == ExitConfig);
    CHECK(exit_code_for(Error(ErrorKind::NewtonStalled, "x")) == ExitFailure);
}

TEST_CASE("solve writes a reproducible report") {
    const ExperimentConfig c = parse_config(std::string(kSquare) + "rhs.expr = 1\nmesh.levels = [5]\n");
    const fs::path a = scratch("solve_a");
    const fs::path b = scratch("solve_b");
    const RunResult r = run_experiment(Command::Solve, c, a);
    CHECK(r.exit_code == ExitSuccess);
    CHECK(r.report["exit_code"] == 0);
    CHECK_FALSE(r.certificates.empty());
    for (const Certificate& cert : r.certificates) {
        CAPTURE(cert.name);
        CHECK(cert.passed);
    }
    CHECK(first_line(a / "field.csv") == "x1,x2,v,u,u11,u12,u22");
    REQUIRE(fs::exists(a / "report.json"));
    const nlohmann::json report = nlohmann::json::parse(slurp(a / "report.json"));
    CHECK(report["exit_code"] == 0);
    run_experiment(Command::Solve, c, b);
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    CHECK(slurp(a / "field.csv") == slurp(b / "field.csv"));
}

TEST_CASE("incompatible H is reported") {
    const ExperimentConfig c = parse_config(std::string(kSquare) + "rhs.expr = 2\nmesh.levels = [4]\n");
    const fs::path out = scratch("incompatible");
    const RunResult r = run_experiment(Command::Solve, c, out);
    CHECK(r.exit_code == ExitIncompatible);
    REQUIRE(fs::exists(out / "report.json"));
    CHECK(nlohmann::json::parse(slurp(out / "report.json"))["exit_code"] == 2);
    bool failed = false;
    for (const Certificate& cert : r.certificates)
        if (cert.name == "compatibility") failed = !cert.passed;
    CHECK(failed);
}

TEST_CASE("approximation study") {
    const Polygon P = fixtures::square();
    /// Smooth H is used as is: every level gives the same solution.
    const ApproximationStudy smooth =
        approximation_study(P, fixtures::x1x2_rhs(P), {0, 0, 1, 0}, {4, 1.0, 0.25}, {}, 3, 3);
    CHECK(smooth.table.size() == 2);
    for (const ApproximationRow& row : smooth.table) CHECK(row.difference == 0.0);
    CHECK(smooth.nonincreasing);
    const ApproximationStudy single =
        approximation_study(P, fixtures::holder_rhs(P), fixtures::zeros(4), {4, 1.0, 0.25}, {}, 1, 3);
    CHECK(single.table.empty());
    CHECK(single.widths.size() == 1);
}

TEST_CASE("mollified H keeps the compatible vertex values") {
    const Polygon P = fixtures::square();
    const RhsField H = fixtures::holder_rhs(P);
    for (double width : {0.125, 0.03125}) {
        double correction = -1.0;
        const RhsField M = mollify_and_pin(P, H, width, &correction);
        CHECK(correction >= 0.0);
        CHECK(correction < 0.5 * H.a());
        for (Point v : P.vertices()) CHECK(M(v) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(M.a() > 0.0);
        /// Close to H away from the boundary.
        CHECK(std::abs(M({0.5, 0.5}) - H({0.5, 0.5})) < 0.5);
    }
}

TEST_CASE("command line") {
    if (std::getenv("TORICMA_CLI") == nullptr) {
        MESSAGE("TORICMA_CLI not set; skipping");
        return;
    }
    const fs::path dir = scratch("cli");
    {
        std::ofstream(dir / "ok.cfg") << kSquare << "rhs.expr = 1\nmesh.levels = [5]\n";
        std::ofstream(dir / "incompatible.cfg") << kSquare << "rhs.expr = 2\nmesh.levels = [4]\n";
        std::ofstream(dir / "broken.cfg") << kSquare << "rhs.expr = 1\nmesh.levels = [5]\nnot.a.key = 3\n";
        std::ofstream(dir / "concave.cfg") << "polygon.vertices = [[0, 0], [2, 0], [1, 0.2], [1, 2]]\nrhs.expr = 1\n";
    }
    CHECK(run_cli("solve --config " + (dir / "ok.cfg").string() + " --out " + (dir / "solve").string()) == 0);
    CHECK(first_line(dir / "solve" / "field.csv") == "x1,x2,v,u,u11,u12,u22");
    CHECK(run_cli("boundary --config " + (dir / "ok.cfg").string() + " --out " + (dir / "boundary").string()) == 0);
    for (int e = 0; e < 4; ++e)
        CHECK(first_line(dir / "boundary" / ("boundary_edge" + std::to_string(e) + ".csv")) == "t,u,v,h");
    CHECK(run_cli("solve --config " + (dir / "incompatible.cfg").string() + " --out " + (dir / "inc").string()) == 2);
    CHECK(fs::exists(dir / "inc" / "report.json"));
    CHECK(run_cli("solve --config " + (dir / "broken.cfg").string() + " --out " + (dir / "broken").string()) == 3);
    CHECK(run_cli("solve --config " + (dir / "concave.cfg").string() + " --out " + (dir / "concave").string()) == 3);
    CHECK(run_cli("solve --config " + (dir / "ok.cfg").string() + " --mesh-level 4 --out " +
                  (dir / "level4").string()) == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "level4" / "report.json"))["mesh"]["level"] == 4);
}
