#include "cli.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using pdarcy::cli::dispatch;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args)
{
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = dispatch(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string config(const std::string& name) { return (fs::path(PDARCY_CONFIG_DIR) / name).string(); }

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("pdarcy_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

}  // namespace

TEST(Cli, ValidateAdmissibleSine)
{
    const auto r = run({"validate-zeta", "--config", config("sine_admissible.ini")});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("admissible: true"), std::string::npos);
}

TEST(Cli, ValidateConstantListsViolation)
{
    const auto r = run({"validate-zeta", "--config", config("constant_inadmissible.ini")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("admissible: false"), std::string::npos);
    EXPECT_NE(r.err.find("violation:"), std::string::npos);
}

TEST(Cli, ValidateFromFlags)
{
    EXPECT_EQ(run({"validate-zeta", "--zeta-family", "bump", "--amplitude", "0.1"}).code, 0);
    EXPECT_EQ(run({"validate-zeta", "--zeta-family", "constant", "--value", "0.2"}).code, 1);
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(run({}).code, 64);
    const auto r = run({"frobnicate"});
    EXPECT_EQ(r.code, 64);
    EXPECT_NE(r.err.find("usage:"), std::string::npos);
    EXPECT_EQ(run({"solve1d", "--method", "spectral"}).code, 64);
    EXPECT_EQ(run({"study", "--out-dir", "x"}).code, 64);
    EXPECT_EQ(run({"solve1d", "--help"}).code, 0);
}

TEST(Cli, MissingConfigIsIoError)
{
    EXPECT_EQ(run({"validate-zeta", "--config", "/nonexistent/run.ini"}).code, 3);
}

TEST(Cli, BadConfigIsValidationFailure)
{
    const auto dir = scratch("badcfg");
    std::ofstream(dir / "bad.ini") << "[domain]\nepsilon = 2\n";
    const auto r = run({"validate-zeta", "--config", (dir / "bad.ini").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("epsilon"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Cli, Solve1dCsv)
{
    const auto r = run({"solve1d", "--zeta", "0.25", "--eps", "0.5", "--samples", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_line(r.out), "x,value,derivative,piece_id");
    std::istringstream lines(r.out);
    std::string line;
    int rows = -1;
    while (std::getline(lines, line)) {
        ++rows;
    }
    EXPECT_EQ(rows, 9);
    // F = 0, f = 1: p' = 1 below the interface and p' = 0 above it
    EXPECT_NE(r.out.find("\n0.25,1.25,1,1\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("\n0.25,1.25,0,2\n"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("\n1,1.25,0,2\n"), std::string::npos) << r.out;
}

TEST(Cli, Solve1dMethodsAgreeAtNodes)
{
    // the flattened solution lives on the reference line: its interface node 0 carries p(zeta)
    const auto exact = run({"solve1d", "--zeta", "0.25", "--method", "exact", "--samples", "2"});
    const auto flat = run({"solve1d", "--zeta", "0.25", "--method", "flattened", "--samples", "2"});
    ASSERT_EQ(exact.code, 0);
    ASSERT_EQ(flat.code, 0);
    EXPECT_NE(exact.out.find("\n0.25,1.25,"), std::string::npos) << exact.out;
    EXPECT_NE(flat.out.find("\n0,1.25,"), std::string::npos) << flat.out;
    EXPECT_NE(flat.out.find("\n1,1.25,"), std::string::npos) << flat.out;
}

TEST(Cli, Solve2dWritesFieldAndMesh)
{
    const auto dir = scratch("solve2d");
    const auto r = run({"solve2d", "--config", config("sine_admissible.ini"), "--nx", "8", "--nz", "4", "--out",
                        (dir / "field.csv").string(), "--mesh-out", (dir / "mesh.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto field = slurp(dir / "field.csv");
    const auto mesh = slurp(dir / "mesh.csv");
    EXPECT_EQ(first_line(field), "node_id,x,z,value");
    EXPECT_EQ(first_line(mesh), "triangle_id,n0,n1,n2,region");
    EXPECT_EQ(std::count(field.begin(), field.end(), '\n'), 1 + 9 * 9);
    EXPECT_EQ(std::count(mesh.begin(), mesh.end(), '\n'), 1 + 2 * 8 * 8);
    EXPECT_NE(r.err.find("CG iterations"), std::string::npos);

    const auto again = run({"solve2d", "--config", config("sine_admissible.ini"), "--nx", "8", "--nz", "4", "--out",
                            (dir / "field2.csv").string()});
    ASSERT_EQ(again.code, 0);
    EXPECT_EQ(field, slurp(dir / "field2.csv"));
    fs::remove_all(dir);
}

TEST(Cli, Solve2dRefusesInadmissibleZeta)
{
    const auto r = run({"solve2d", "--config", config("constant_inadmissible.ini"), "--nx", "4", "--nz", "2"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("violation:"), std::string::npos);
}

TEST(Cli, Solve2dNonconvergence)
{
    const auto dir = scratch("nonconv");
    std::ofstream(dir / "run.ini") << "[perturbation]\nfamily = sine\namplitude = 0.2\n[forcing]\nF = 1\n"
                                      "[solver]\nnx = 16\nnz = 16\nmax_iterations = 1\n";
    const auto r = run({"solve2d", "--config", (dir / "run.ini").string()});
    EXPECT_EQ(r.code, 2) << r.err;
    fs::remove_all(dir);
}

TEST(Cli, UnwritableOutputIsIoError)
{
    const auto r = run({"solve1d", "--zeta", "0", "--out", "/nonexistent/dir/out.csv"});
    EXPECT_EQ(r.code, 3);
}

TEST(Cli, FlattenCheck)
{
    const auto r = run({"flatten-check", "--config", config("sine_admissible.ini"), "--points", "200"});
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("passed: true"), std::string::npos);
}

TEST(Cli, FlattenSolveCompareFitted)
{
    const auto dir = scratch("compare");
    const auto r = run({"flatten-solve", "--config", config("sine_admissible.ini"), "--nx", "4", "--nz", "4", "--levels",
                        "3", "--compare-fitted", (dir / "gap.csv").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(slurp(dir / "gap.csv"));
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "h,vnorm_gap");
    double previous = 1e300;
    int rows = 0;
    while (std::getline(lines, line)) {
        const auto comma = line.find(',');
        const double h = std::stod(line.substr(0, comma));
        const double gap = std::stod(line.substr(comma + 1));
        EXPECT_DOUBLE_EQ(h, 0.25 / (1 << rows));
        EXPECT_LT(gap, previous);
        previous = gap;
        ++rows;
    }
    EXPECT_EQ(rows, 3);
    fs::remove_all(dir);
}

TEST(Cli, StudySqrtFamily)
{
    const auto dir = scratch("study");
    const auto r = run({"study", "--config", config("study_sqrt_1d.ini"), "--out-dir", (dir / "a").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto summary = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
    EXPECT_NEAR(summary["loglog_slope"].get<double>(), 0.5, 0.02);
    EXPECT_TRUE(fs::exists(dir / "a" / "records.csv"));

    ASSERT_EQ(run({"study", "--config", config("study_sqrt_1d.ini"), "--out-dir", (dir / "b").string()}).code, 0);
    EXPECT_EQ(slurp(dir / "a" / "records.csv"), slurp(dir / "b" / "records.csv"));
    auto other = nlohmann::json::parse(slurp(dir / "b" / "summary.json"));
    auto first = summary;
    for (auto* j : {&first, &other}) {
        j->erase("runtime_seconds");
        j->erase("runtime_seconds_total");
    }
    EXPECT_EQ(first, other);
    fs::remove_all(dir);
}

TEST(Cli, StudyModeOverride)
{
    const auto dir = scratch("mode");
    EXPECT_EQ(run({"study", "--config", config("study_sqrt_1d.ini"), "--mode", "4d", "--out-dir", dir.string()}).code, 1);
    fs::remove_all(dir);
}
