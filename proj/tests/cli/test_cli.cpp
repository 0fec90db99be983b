#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "driver/commands.hpp"
#include "driver/config.hpp"

namespace kerrcav::cli {
namespace {

namespace fs = std::filesystem;

const char* kMinimal = R"({
  "dimension": 8, "chi": 0, "gamma": 0.5, "t_max": 2, "num_points": 5,
  "initial_state": {"type": "fock", "n": 1}
})";

std::string config_error_field(std::string_view text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

std::string config_error_message(std::string_view text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "<no error>";
}

std::vector<std::string> lines_of(const std::string& text)
{
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) {
        fields.push_back(field);
    }
    return fields;
}

std::vector<std::vector<std::string>> kraus_table_rows(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    bool in_table = false;
    for (const auto& line : lines_of(text)) {
        if (in_table) {
            rows.push_back(split(line, ','));
        } else if (line == "m,n,l,conjugacy_defect") {
            in_table = true;
        }
    }
    return rows;
}

// ---- config parsing --------------------------------------------------------

TEST(Config, MinimalDocumentGetsDefaults)
{
    const RunConfig cfg = parse_config(kMinimal);
    EXPECT_EQ(cfg.dimension, 8u);
    EXPECT_EQ(cfg.chi, 0.0);
    EXPECT_EQ(cfg.gamma, 0.5);
    EXPECT_EQ(cfg.times, (std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0}));
    ASSERT_TRUE(std::holds_alternative<FockState>(cfg.initial_state));
    EXPECT_EQ(std::get<FockState>(cfg.initial_state).n, 1u);
    EXPECT_FALSE(cfg.fidelity_reference.has_value());
    EXPECT_EQ(cfg.solvers, std::vector<Solver>{Solver::Kraus});
    EXPECT_EQ(cfg.rk4_steps_per_unit_time, 10000u);
    EXPECT_EQ(cfg.liouville_max_dim, kDefaultLiouvillianMaxDim);
    EXPECT_FALSE(cfg.output_path.has_value());
    EXPECT_EQ(cfg.format, OutputFormat::Csv);
    EXPECT_FALSE(cfg.qgrid.has_value());
    EXPECT_FALSE(cfg.dump_density_matrices);
    EXPECT_EQ(cfg.threshold, 1e-6);
    EXPECT_EQ(cfg.integrator_for(0.5).steps, 5000u);
    EXPECT_EQ(cfg.integrator_for(0.0).steps, 1u);
}

TEST(Config, NegativeGammaNamesField)
{
    EXPECT_EQ(config_error_field(R"({"dimension": 4, "chi": 0, "gamma": -1, "times": [0],
                                     "initial_state": {"type": "fock", "n": 0}})"),
              "gamma");
}

TEST(Config, TimesMustAscend)
{
    const char* doc = R"({"dimension": 4, "chi": 0, "gamma": 1, "times": [1.0, 0.5],
                          "initial_state": {"type": "fock", "n": 0}})";
    EXPECT_EQ(config_error_field(doc), "times");
    EXPECT_NE(config_error_message(doc).find("times not ascending"), std::string::npos);
}

TEST(Config, UnknownKeysRejectedAtEveryLevel)
{
    EXPECT_EQ(config_error_field(R"({"dimension": 4, "chi": 0, "gamma": 1, "times": [0], "gama": 2,
                                     "initial_state": {"type": "fock", "n": 0}})"),
              "gama");
    EXPECT_EQ(config_error_field(R"({"dimension": 4, "chi": 0, "gamma": 1, "times": [0],
                                     "initial_state": {"type": "fock", "n": 0, "alpha": 1}})"),
              "initial_state.alpha");
    EXPECT_EQ(config_error_field(R"({"dimension": 4, "chi": 0, "gamma": 1, "times": [0],
                                     "initial_state": {"type": "fock", "n": 0},
                                     "output": {"path": "x", "colour": "red"}})"),
              "output.colour");
}

TEST(Config, SyntaxErrorReportsLine)
{
    const std::string msg = config_error_message("{\n  \"dimension\": 4,\n  \"chi\": ,\n}");
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Config, OtherValidation)
{
    EXPECT_EQ(config_error_field(R"({"dimension": 1, "chi": 0, "gamma": 1, "times": [0],
                                     "initial_state": {"type": "fock", "n": 0}})"),
              "dimension");
    EXPECT_EQ(config_error_field(R"({"dimension": 4, "chi": 0, "gamma": 1, "times": [0],
                                     "initial_state": {"type": "fock", "n": 4}})"),
              "initial_state.n");
    EXPECT_EQ(config_error_field(R"({"dimension": 4, "chi": 0, "gamma": 1, "times": [0], "t_max": 1,
                                     "num_points": 2, "initial_state": {"type": "fock", "n": 0}})"),
              "times");
    EXPECT_EQ(config_error_field(R"({"dimension": 4, "chi": 0, "gamma": 1, "times": [0],
                                     "initial_state": {"type": "fock", "n": 0}, "solvers": ["euler"]})"),
              "solvers");
    // a mixed initial state needs an explicit pure fidelity reference
    EXPECT_EQ(config_error_field(R"({"dimension": 4, "chi": 0, "gamma": 1, "times": [0],
                                     "initial_state": {"type": "thermal", "nbar": 0.3}})"),
              "fidelity_reference");
}

TEST(Config, StateForms)
{
    const RunConfig cfg = parse_config(R"({"dimension": 10, "chi": 0.1, "gamma": 0.1, "times": [0, 1],
        "initial_state": {"type": "cat", "alpha": [1.0, -0.5], "phase": 3.14},
        "fidelity_reference": {"type": "coherent", "alpha": 0.5},
        "solvers": ["kraus", "rk4"], "qgrid": {"resolution": 16}})");
    const auto& cat = std::get<CatState>(cfg.initial_state);
    EXPECT_EQ(cat.alpha, Complex(1.0, -0.5));
    EXPECT_EQ(cat.phase, 3.14);
    EXPECT_EQ(std::get<CoherentState>(cfg.reference_state()).alpha, Complex(0.5, 0.0));
    ASSERT_TRUE(cfg.qgrid.has_value());
    EXPECT_EQ(cfg.qgrid->resolution, 16u);
    EXPECT_EQ(cfg.qgrid->re_min, -4.0);
}

TEST(Config, JsonRoundTrip)
{
    const RunConfig cfg = parse_config(kMinimal);
    const RunConfig again = parse_config(to_json(cfg).dump());
    EXPECT_EQ(to_json(again).dump(), to_json(cfg).dump());
}

// ---- formatting ------------------------------------------------------------

TEST(Formatting, SeventeenDigitRoundTrip)
{
    for (double v : {M_PI, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.1, 1.0 - 1e-16}) {
        const std::string s = format_real(v);
        double back = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
        ASSERT_EQ(res.ec, std::errc()) << s;
        EXPECT_EQ(back, v) << s;
    }
}

TEST(Formatting, CsvHeader)
{
    EXPECT_EQ(csv_header(3), "t,solver,trace_re,trace_im,purity,mean_n,fidelity_vs_ref,min_eig,p0,p1,p2");
}

// ---- in-process commands ---------------------------------------------------

TEST(Commands, EvolveAtZeroTimeReportsInitialState)
{
    RunConfig cfg = parse_config(R"({"dimension": 6, "chi": 0.2, "gamma": 0.3, "times": [0],
        "initial_state": {"type": "coherent", "alpha": 0.7}})");
    std::ostringstream out;
    std::ostringstream diag;
    ASSERT_EQ(run_evolve(cfg, out, diag), kExitOk);
    const auto lines = lines_of(out.str());
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0], csv_header(6));
    const auto fields = split(lines[1], ',');
    ASSERT_EQ(fields.size(), 8u + 6u);
    EXPECT_EQ(fields[0], "0");
    EXPECT_EQ(fields[1], "kraus");
    EXPECT_NEAR(std::stod(fields[4]), 1.0, 1e-12);  // purity
    EXPECT_NEAR(std::stod(fields[6]), 1.0, 1e-12);  // fidelity vs itself
}

TEST(Commands, EvolveJsonContainsRecordsAndGrid)
{
    RunConfig cfg = parse_config(R"({"dimension": 6, "chi": 0.2, "gamma": 0.3, "times": [0, 1],
        "initial_state": {"type": "fock", "n": 2}, "qgrid": {"resolution": 8},
        "dump_density_matrices": true})");
    cfg.format = OutputFormat::Json;
    std::ostringstream out;
    std::ostringstream diag;
    ASSERT_EQ(run_evolve(cfg, out, diag), kExitOk);
    const auto doc = nlohmann::json::parse(out.str());
    EXPECT_EQ(doc.at("records").size(), 2u);
    EXPECT_EQ(doc.at("qgrid").at("values").size(), 64u);
    EXPECT_TRUE(doc.contains("density_matrices"));
    EXPECT_EQ(doc.at("config").at("dimension"), 6);
}

TEST(Commands, CompareNeedsTwoSolvers)
{
    RunConfig cfg = parse_config(kMinimal);
    std::ostringstream out;
    std::ostringstream diag;
    EXPECT_EQ(run_compare(cfg, out, diag), kExitUsage);
}

TEST(Commands, CompareZeroTimeAllZero)
{
    RunConfig cfg = parse_config(R"({"dimension": 8, "chi": 0.3, "gamma": 0.2, "times": [0],
        "initial_state": {"type": "coherent", "alpha": 1.5}, "solvers": ["kraus", "rk4", "liouville"]})");
    std::ostringstream out;
    std::ostringstream diag;
    EXPECT_EQ(run_compare(cfg, out, diag), kExitOk);
    for (const auto& line : lines_of(out.str())) {
        const auto fields = split(line, ',');
        if (fields.size() == 5 && fields[0] == "0") {
            EXPECT_EQ(std::stod(fields[3]), 0.0) << line;
        }
    }
}

TEST(Commands, CompareCoarseRk4Fails)
{
    RunConfig cfg = parse_config(R"({"dimension": 16, "chi": 0.3, "gamma": 0.2, "times": [2],
        "initial_state": {"type": "coherent", "alpha": 1.5}, "solvers": ["kraus", "rk4", "liouville"],
        "rk4_steps_per_unit_time": 10})");
    std::ostringstream out;
    std::ostringstream diag;
    EXPECT_EQ(run_compare(cfg, out, diag), kExitFailure);
    EXPECT_NE(out.str().find("kraus,liouville"), std::string::npos) << out.str();
    EXPECT_NE(out.str().find("SOLVER_ERROR"), std::string::npos) << out.str();
}

TEST(Commands, ValidateDefaultGridPasses)
{
    RunConfig cfg = parse_config(R"({"dimension": 16, "chi": 0.3, "gamma": 0.2, "times": [0.25, 0.5, 1, 2, 5],
        "initial_state": {"type": "coherent", "alpha": 1.5}})");
    std::ostringstream out;
    std::ostringstream diag;
    EXPECT_EQ(run_validate(cfg, out, diag), kExitOk) << out.str();
    EXPECT_EQ(out.str().find("FAIL"), std::string::npos) << out.str();
}

TEST(Commands, KrausCheckReportsNonConjugateTerms)
{
    RunConfig cfg = parse_config(R"({"dimension": 8, "chi": 1, "gamma": 1, "times": [1],
        "initial_state": {"type": "coherent", "alpha": 1.0}})");
    std::ostringstream out;
    std::ostringstream diag;
    EXPECT_EQ(run_kraus_check(cfg, out, diag), kExitOk) << out.str();
    double max_defect = 0.0;
    const auto rows = kraus_table_rows(out.str());
    ASSERT_FALSE(rows.empty());
    for (const auto& fields : rows) {
        ASSERT_EQ(fields.size(), 4u);
        max_defect = std::max(max_defect, std::stod(fields[3]));
    }
    EXPECT_GT(max_defect, 1e-3);
}

TEST(Commands, KrausCheckWithoutKerrHasConjugateDiagonalPairs)
{
    RunConfig cfg = parse_config(R"({"dimension": 8, "chi": 0, "gamma": 1, "times": [1],
        "initial_state": {"type": "fock", "n": 3}})");
    std::ostringstream out;
    std::ostringstream diag;
    EXPECT_EQ(run_kraus_check(cfg, out, diag), kExitOk);
    const auto rows = kraus_table_rows(out.str());
    ASSERT_FALSE(rows.empty());
    for (const auto& fields : rows) {
        ASSERT_EQ(fields.size(), 4u);
        if (fields[0] == fields[1]) {
            EXPECT_LE(std::stod(fields[3]), 1e-14) << fields[0] << ',' << fields[2];
        }
    }
}

// ---- the installed binary --------------------------------------------------

class Binary : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::path(KERRCAV_TEST_TMPDIR) / ::testing::UnitTest::GetInstance()->current_test_info()->name();
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }

    fs::path write(const std::string& name, const std::string& content) const
    {
        const fs::path p = dir_ / name;
        std::ofstream(p) << content;
        return p;
    }

    static std::string slurp(const fs::path& p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    int run(const std::string& args) const
    {
        const std::string cmd = std::string(KERRCAV_CLI_PATH) + " " + args + " >" + (dir_ / "stdout").string() +
                                " 2>" + (dir_ / "stderr").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    fs::path dir_;
};

TEST_F(Binary, EvolveIsDeterministic)
{
    const auto cfg = write("cfg.json", R"({"dimension": 10, "chi": 0.4, "gamma": 0.1, "t_max": 3, "num_points": 4,
        "initial_state": {"type": "cat", "alpha": 1.2, "phase": 0}, "solvers": ["kraus", "liouville"]})");
    for (const char* fmt : {"csv", "json"}) {
        const auto a = dir_ / (std::string("a.") + fmt);
        const auto b = dir_ / (std::string("b.") + fmt);
        ASSERT_EQ(run("evolve --config " + cfg.string() + " --format " + fmt + " --out " + a.string()), 0);
        ASSERT_EQ(run("evolve --config " + cfg.string() + " --format " + fmt + " --out " + b.string()), 0);
        EXPECT_FALSE(slurp(a).empty());
        EXPECT_EQ(slurp(a), slurp(b)) << fmt;
    }
}

TEST_F(Binary, ExitCodes)
{
    const auto good = write("good.json", kMinimal);
    const auto bad = write("bad.json", R"({"dimension": 8, "chi": 0, "gamma": -1, "times": [0],
        "initial_state": {"type": "fock", "n": 0}})");
    const auto coarse = write("coarse.json", R"({"dimension": 16, "chi": 0.3, "gamma": 0.2, "times": [2],
        "initial_state": {"type": "coherent", "alpha": 1.5}, "solvers": ["kraus", "rk4"],
        "rk4_steps_per_unit_time": 10})");

    EXPECT_EQ(run("validate --config " + good.string()), 0);
    EXPECT_EQ(run("evolve --config " + bad.string()), 2);
    EXPECT_NE(slurp(dir_ / "stderr").find("gamma"), std::string::npos);
    EXPECT_EQ(run("frobnicate --config " + good.string()), 2);
    EXPECT_EQ(run("evolve"), 2);
    EXPECT_EQ(run("evolve --config " + (dir_ / "missing.json").string()), 2);
    EXPECT_EQ(run("compare --config " + good.string()), 2);
    EXPECT_EQ(run("compare --config " + coarse.string()), 1);
    EXPECT_FALSE(slurp(dir_ / "stderr").empty());
    EXPECT_EQ(run("evolve --config " + coarse.string()), 1);
    EXPECT_NE(slurp(dir_ / "stderr").find("rk4"), std::string::npos);
}

TEST_F(Binary, CompareThresholdOverride)
{
    const auto cfg = write("cfg.json", R"({"dimension": 8, "chi": 0.3, "gamma": 0.2, "times": [1],
        "initial_state": {"type": "coherent", "alpha": 1.0}, "solvers": ["kraus", "rk4"],
        "rk4_steps_per_unit_time": 1000})");
    EXPECT_EQ(run("compare --config " + cfg.string()), 0);
    EXPECT_EQ(run("compare --config " + cfg.string() + " --threshold 1e-16"), 1);
    EXPECT_NE(slurp(dir_ / "stdout").find("FAIL"), std::string::npos);
}

} // namespace
} // namespace kerrcav::cli
