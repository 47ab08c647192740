#include "shortmem/config.hpp"
#include "shortmem/dispatch.hpp"
#include "shortmem/error.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace shortmem;
namespace fs = std::filesystem;

namespace {

const char* const kCouple = R"(# two-sided geometric filter driven by a Brownian grid
seed = 11
grid = 64, 256, 1024
replicates = 6

[coeffs]
kind = geometric
param = 0.5

[model]
kind = bm-coupled
)";

const char* const kCausal = R"(seed = 5
grid = 128, 512, 2048
replicates = 5
m = 3

[coeffs]
kind = causal-geometric
param = 0.6

[model]
kind = exponential
param = 1
)";

const char* const kBlocks = R"(seed = 1
grid = 16, 64
[coeffs]
kind = prop10
param = 4
)";

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("shortmem_test_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

Errc code_of(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::invariant;  // no error at all
}

std::vector<std::string> csv_rows(const fs::path& p)
{
    std::vector<std::string> rows;
    std::istringstream in(slurp(p));
    for (std::string line; std::getline(in, line);)
        rows.push_back(line);
    return rows;
}

struct CliRun {
    int status = 0;
    std::string out;
    std::string err;
};

CliRun run_cli(const std::string& args, const std::string& tag)
{
    const fs::path dir = scratch("run_" + tag);
    fs::create_directories(dir);
    const std::string cmd = std::string(SHORTMEM_CLI_PATH) + " " + args + " > " + (dir / "out").string() + " 2> " +
                            (dir / "err").string();
    const int raw = std::system(cmd.c_str());
    CliRun r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(dir / "out");
    r.err = slurp(dir / "err");
    return r;
}

fs::path write_config(const std::string& text, const std::string& tag)
{
    const fs::path dir = scratch("cfg_" + tag);
    fs::create_directories(dir);
    std::ofstream(dir / "run.cfg") << text;
    return dir / "run.cfg";
}

}  // namespace

TEST(ParseConfig, ReadsSectionsAndLists)
{
    const SimConfig c = parse_config(kCouple);
    EXPECT_EQ(c.seed, 11u);
    EXPECT_EQ(c.grid, (std::vector<std::int64_t>{64, 256, 1024}));
    EXPECT_EQ(c.replicates, 6);
    EXPECT_EQ(c.coeffs.kind, "geometric");
    EXPECT_EQ(c.coeffs.param, 0.5);
    EXPECT_EQ(c.model.kind, InnovationKind::bm_coupled);
    EXPECT_EQ(c.p_list, (std::vector<double>{1.0, 2.0}));
    EXPECT_EQ(c.tol.tail, 1e-10);
}

TEST(ParseConfig, CanonicalFormRoundTrips)
{
    for (const char* text : {kCouple, kCausal, kBlocks}) {
        const std::string once = format_config(parse_config(text));
        EXPECT_EQ(format_config(parse_config(once)), once);
    }
    const SimConfig finite = parse_config("seed = 2\ngrid = 8\n[coeffs]\nkind = finite\nparam = 0.1, -0.25, 1\n");
    EXPECT_EQ(parse_config(format_config(finite)).coeffs.values, (std::vector<double>{0.1, -0.25, 1.0}));
}

TEST(ParseConfig, RejectsMalformedInput)
{
    EXPECT_EQ(code_of("seed = 1\ngrid = 4\nspeed = 3\n"), Errc::validation);
    EXPECT_EQ(code_of("seed = 1\nseed = 2\ngrid = 4\n"), Errc::validation);
    EXPECT_EQ(code_of("seed = 1\ngrid = 4, x\n"), Errc::parse);
    EXPECT_EQ(code_of("grid = 4\n"), Errc::validation);
    EXPECT_EQ(code_of("seed = 1\ngrid = 16, 4\n"), Errc::validation);
    EXPECT_EQ(code_of("seed = 1\ngrid = 4\n[coeffs]\nkind = geometric\nparam = 1.5\n"), Errc::validation);
    EXPECT_EQ(code_of("seed = 1\ngrid = 4\n[coeffs]\nkind = polynomial\nparam = 0.5\n"), Errc::validation);
    EXPECT_EQ(code_of("seed = 1\ngrid = 4\nreplicates = 0\n"), Errc::validation);
    EXPECT_EQ(code_of("seed = 1\ngrid = 4\nweight = cubic\n"), Errc::validation);
    EXPECT_EQ(code_of("seed = 1\ngrid = 4\nno equals sign\n"), Errc::parse);
}

TEST(ParseConfig, ErrorsNameTheLine)
{
    try {
        parse_config("seed = 1\n\ngrid = 4, 8z\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(FormatNumber, ShortestRoundTrip)
{
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(3.0), "3");
    EXPECT_EQ(format_number(1e-10), "1e-10");
    EXPECT_EQ(format_number(std::int64_t{-42}), "-42");
    EXPECT_EQ(format_number(std::uint64_t{18446744073709551615u}), "18446744073709551615");
    for (double v : {1.0 / 3.0, 2.0 / 7.0, 1e300, 5e-324})
        EXPECT_EQ(std::strtod(format_number(v).c_str(), nullptr), v);
}

TEST(BuildCoefficients, WindowFromToleranceOrConfig)
{
    SimConfig c = parse_config(kCouple);
    EXPECT_LT(build_coefficients(c).tail_beyond_window(), c.tol.tail);
    c.coeffs.window = 10;
    EXPECT_EQ(build_coefficients(c).hi(), 10);
    EXPECT_EQ(build_coefficients(parse_config(kBlocks)).hi(), 1024);
}

TEST(Dispatch, DataFilesIndependentOfWorkers)
{
    const std::vector<std::pair<std::string, const char*>> runs{
        {"simulate", kCouple}, {"couple", kCouple},      {"variance", kCouple},   {"weighted", kCausal},
        {"coboundary", kCausal}, {"diagnose", kCausal}, {"counterexample", kBlocks}};
    for (const auto& [command, text] : runs) {
        SimConfig c = parse_config(text);
        c.out_dir = scratch(command + "_a").string();
        const std::vector<std::string> files = dispatch(command, c, 1);
        ASSERT_FALSE(files.empty()) << command;
        for (int workers : {1, 4}) {
            SimConfig d = c;
            d.out_dir = scratch(command + "_b" + std::to_string(workers)).string();
            EXPECT_EQ(dispatch(command, d, workers), files);
            for (const auto& f : files)
                EXPECT_EQ(slurp(fs::path(c.out_dir) / f), slurp(fs::path(d.out_dir) / f)) << command << "/" << f;
        }
        const auto meta = nlohmann::json::parse(slurp(fs::path(c.out_dir) / "meta.json"));
        EXPECT_EQ(meta.at("command"), command);
        EXPECT_EQ(meta.at("files").get<std::vector<std::string>>(), files);
    }
}

TEST(Dispatch, UnknownCommand)
{
    SimConfig c = parse_config(kCouple);
    c.out_dir = scratch("unknown").string();
    EXPECT_THROW(dispatch("plot", c), Error);
}

TEST(Dispatch, IdentityCouplingIsZero)
{
    SimConfig c = parse_config(kCouple);
    c.coeffs = CoefficientSpec{};
    c.out_dir = scratch("identity").string();
    dispatch("couple", c);
    const auto rows = csv_rows(fs::path(c.out_dir) / "coupling.csv");
    ASSERT_EQ(rows.front(), "n,stat,mean,median,q90");
    int checked = 0;
    for (const auto& row : rows)
        if (row.find(",coupling,") != std::string::npos || row.find(",sup_bm,") != std::string::npos) {
            EXPECT_NE(row.find(",0,0,0"), std::string::npos) << row;
            ++checked;
        }
    EXPECT_EQ(checked, 6);
}

TEST(Dispatch, CounterexampleTables)
{
    SimConfig c = parse_config(kBlocks);
    c.out_dir = scratch("blocks").string();
    dispatch("counterexample", c);
    const auto variance = csv_rows(fs::path(c.out_dir) / "blocks_variance.csv");
    ASSERT_EQ(variance.size(), 4u);
    EXPECT_EQ(variance[0], "r,n,exact,defensible_bound,paper_bound,meets_paper_bound,slope");
    EXPECT_EQ(variance[1].substr(0, 5), "1,16,");
    EXPECT_EQ(variance[3].substr(0, 6), "3,256,");
    const auto projection = csv_rows(fs::path(c.out_dir) / "blocks_projection.csv");
    ASSERT_EQ(projection.size(), 5u);
    EXPECT_EQ(projection[1].substr(0, 20), "1,0.3333333333333333");
    const auto report = nlohmann::json::parse(slurp(fs::path(c.out_dir) / "blocks.json"));
    EXPECT_TRUE(report.is_object());
}

TEST(Dispatch, CounterexampleNeedsBlockSequence)
{
    SimConfig c = parse_config(kCouple);
    c.out_dir = scratch("not_blocks").string();
    EXPECT_THROW(dispatch("counterexample", c), Error);
}

TEST(Cli, RunsAndWritesFiles)
{
    const fs::path cfg = write_config(kCouple, "ok");
    const fs::path out = scratch("cli_out");
    const CliRun r = run_cli("couple -c " + cfg.string() + " -o " + out.string() + " -j 3", "ok");
    EXPECT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(fs::exists(out / "coupling.csv"));
    EXPECT_TRUE(fs::exists(out / "meta.json"));
}

TEST(Cli, CheckConfigPrintsCanonicalForm)
{
    const fs::path cfg = write_config(kCausal, "check");
    const CliRun r = run_cli("check-config -c " + cfg.string(), "check");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out, format_config(parse_config(kCausal)));
}

TEST(Cli, ErrorsAreJsonWithMatchingExitCode)
{
    const fs::path cfg = write_config("seed = 1\ngrid = 16, 4\n", "bad");
    const CliRun r = run_cli("couple -c " + cfg.string() + " -o " + scratch("cli_bad").string(), "bad");
    EXPECT_EQ(r.status, 5);
    const auto err = nlohmann::json::parse(r.err).at("error");
    EXPECT_EQ(err.at("code"), 5);
    EXPECT_EQ(err.at("status"), "validation");
    EXPECT_NE(err.at("message").get<std::string>().find("grid"), std::string::npos);

    const fs::path parse_cfg = write_config("seed = one\n", "parse");
    EXPECT_EQ(run_cli("simulate -c " + parse_cfg.string(), "parse").status, 4);
    EXPECT_NE(run_cli("simulate -c /nonexistent/run.cfg", "missing").status, 0);
}
