#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using rkhs::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

nlohmann::json json_of(const Result& r) { return nlohmann::json::parse(r.out); }

class TempDir {
public:
    TempDir()
    {
        path_ = fs::temp_directory_path() / ("rkhs_cli_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string write(const std::string& name, const std::string& content) const
    {
        const fs::path p = path_ / name;
        std::ofstream(p) << content;
        return p.string();
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::string slurp(const std::string& path)
{
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(call({"--help"}).code, 0);
    EXPECT_EQ(call({}).code, 1);
    EXPECT_EQ(call({"frobnicate"}).code, 1);
    EXPECT_EQ(call({"kernel", "--bogus"}).code, 1);
    EXPECT_EQ(call({"kernel", "--format", "xml"}).code, 1);
    EXPECT_EQ(call({"kernel", "--family", "nonsense"}).code, 1);
    EXPECT_EQ(call({"kernel", "--family", "h_s", "--s", "1"}).code, 1);
    EXPECT_EQ(call({"report"}).code, 1);
    EXPECT_EQ(call({"pick"}).code, 1);
}

TEST(Cli, KernelVerdicts)
{
    const auto hardy = call({"kernel", "--family", "hardy", "-N", "6"});
    ASSERT_EQ(hardy.code, 0) << hardy.err;
    const auto j = json_of(hardy);
    EXPECT_EQ(j.at("cnp_summary"), "pass");
    EXPECT_TRUE(j.contains("regularity"));

    const auto berg = call({"kernel", "--family", "bergman_disc"});
    EXPECT_EQ(berg.code, 2);
    EXPECT_EQ(json_of(berg).at("cnp_summary"), "fail(n=2)");

    const auto csv = call({"kernel", "--family", "hardy", "-N", "3", "--format", "csv"});
    EXPECT_EQ(csv.out, "n,a_n,b_n\n0,1,\n1,1,1\n2,1,0\n3,1,0\n");
}

TEST(Cli, ConfigAndFlagPrecedence)
{
    TempDir dir;
    const auto cfg = dir.write("c.json", R"({"family": "bergman_disc", "N": 5})");
    EXPECT_EQ(call({"kernel", "--config", cfg}).code, 2);
    const auto r = call({"kernel", "--config", cfg, "--family", "hardy"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(json_of(r).at("a").size(), 6u);
    EXPECT_EQ(call({"kernel", "--config", dir.file("missing.json")}).code, 1);
    EXPECT_EQ(call({"kernel", "--config", dir.write("bad.json", "[1,2]")}).code, 1);
}

TEST(Cli, PickProblems)
{
    TempDir dir;
    const auto ok = dir.write("ok.json", R"({"d":1, "nodes":[0.0, 0.5], "targets":[0.0, 0.4]})");
    const auto bad = dir.write("bad.json", R"({"d":1, "nodes":[0.0, 0.5], "targets":[0.0, 0.6]})");
    EXPECT_EQ(call({"pick", "--problem", ok}).code, 0);
    EXPECT_EQ(call({"pick", "--problem", bad}).code, 2);

    const auto sweep = call({"pick", "--problem", bad, "--sweep"});
    ASSERT_EQ(sweep.code, 0) << sweep.err;
    EXPECT_NEAR(json_of(sweep).at("sweep").at("threshold").get<double>() * 0.6, 0.5, 1e-8);

    const auto csv = call({"pick", "--problem", ok, "--sweep", "--steps", "3", "--format", "csv"});
    EXPECT_EQ(csv.out.substr(0, csv.out.find('\n')), "label,size,min_eigenvalue,tolerance,scale,verdict");

    EXPECT_EQ(call({"pick", "--problem", dir.write("malformed.json", R"({"d":1})")}).code, 1);
}

TEST(Cli, PickQuotient)
{
    EXPECT_EQ(call({"pick", "--numerator", "bergman_disc", "--denominator", "hardy"}).code, 0);
    const auto r = call({"pick", "--numerator", "hardy", "--denominator", "bergman_disc"});
    EXPECT_EQ(r.code, 2);
    EXPECT_TRUE(json_of(r).contains("negative_minor"));
    EXPECT_EQ(call({"pick", "--numerator", "hardy"}).code, 1);
}

TEST(Cli, ModelCommands)
{
    EXPECT_EQ(call({"model", "--family", "dirichlet", "--check", "restriction"}).code, 0);
    EXPECT_EQ(call({"model", "--family", "da", "-d", "2", "--check", "projection"}).code, 0);
    EXPECT_EQ(call({"model", "--family", "da", "-d", "3", "-N", "5", "--check", "technical"}).code, 0);
    EXPECT_EQ(call({"model", "--check", "unknown"}).code, 1);
    EXPECT_EQ(call({"model", "--family", "hardy", "--bergman-hereditary"}).code, 2);

    const auto r = call({"model", "--family", "hardy", "-N", "3", "--toeplitz", "dirichlet"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json_of(r);
    EXPECT_TRUE(j.contains("defect_profile"));
    EXPECT_TRUE(j.contains("commutator_tails"));

    EXPECT_EQ(call({"model", "--family", "hardy", "--scale", "1.5"}).code, 2);
    EXPECT_EQ(call({"model", "--family", "hardy", "--order", "2"}).code, 0);
    EXPECT_EQ(call({"model", "--family", "hardy", "--order", "99"}).code, 1);
}

TEST(Cli, ModelAndDilateFromFiles)
{
    TempDir dir;
    const auto tuple = dir.write("t.txt", "tuple 1 2\n0,0 0,0\n0.5,0 0,0\n");
    EXPECT_EQ(call({"model", "--tuple", tuple}).code, 0);
    EXPECT_EQ(call({"dilate", "--tuple", tuple}).code, 0);
    EXPECT_EQ(call({"dilate", "--tuple", dir.write("u.txt", "tuple 1 1\n0.5,0\n")}).code, 2);
    EXPECT_EQ(call({"dilate", "--tuple", dir.write("v.txt", "tuple 1 1\n")}).code, 1);

    const auto ideal = dir.write("i.json", R"j({"d":2, "generators":[{"degree":2, "coeffs":{"(1,1)":1.0}}]})j");
    const auto r = call({"dilate", "--family", "da", "-d", "2", "--ideal", ideal, "--scale", "0.8"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LT(json_of(r).at("certificate").at("range_residual").get<double>(), 1e-12);
}

TEST(Cli, DilateVerdicts)
{
    EXPECT_EQ(call({"dilate", "--zero"}).code, 0);
    EXPECT_EQ(call({"dilate", "--family", "hardy", "--scale", "0.9"}).code, 0);
    EXPECT_EQ(call({"dilate", "--family", "bergman_disc", "--tuple-family", "hardy"}).code, 2);
}

TEST(Cli, ReportIsDeterministic)
{
    TempDir dir;
    const auto cfg = dir.write("r.json", R"({"families": [{"family": "hardy"}, {"family": "da", "d": 2}], "N": 4})");
    const auto out1 = dir.file("a.csv");
    const auto out2 = dir.file("b.csv");
    ASSERT_EQ(call({"report", "--config", cfg, "--format", "csv", "--out", out1}).code, 0);
    ASSERT_EQ(call({"report", "--config", cfg, "--format", "csv", "--out", out2}).code, 0);
    const std::string a = slurp(out1);
    EXPECT_EQ(a, slurp(out2));
    EXPECT_EQ(a.substr(0, a.find('\n')), "section,family,d,N,item,value");
    EXPECT_EQ(a.find("wall_clock"), std::string::npos);

    EXPECT_EQ(call({"report", "--config", dir.write("empty.json", "{}")}).code, 1);
    const auto j = call({"report", "--family", "hardy", "-N", "3"});
    ASSERT_EQ(j.code, 0) << j.err;
    EXPECT_TRUE(json_of(j).contains("wall_clock_seconds"));
}

TEST(Cli, FlattenCsv)
{
    const nlohmann::json j = {{"a", 1}, {"b", {{"c", "x"}, {"d", {1.5, 2}}}}};
    EXPECT_EQ(rkhs::cli::flatten_csv(j), "key,value\na,1\nb.c,x\nb.d[0],1.5\nb.d[1],2\n");
}
