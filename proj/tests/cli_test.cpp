#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli_app.hpp"

using namespace dualpath;
namespace fs = std::filesystem;

namespace
{
class CliTest : public ::testing::Test
{
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("dualpath_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }

    void TearDown() override { fs::remove_all(dir_); }

    std::string file(const std::string& name, const std::string& content)
    {
        const auto p = dir_ / name;
        write_text_file(p, content);
        return p.string();
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    int run(std::vector<std::string> args)
    {
        out_.str("");
        err_.str("");
        return cli::run(std::move(args), {out_, err_});
    }

    nlohmann::json report() const { return nlohmann::json::parse(out_.str()); }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

const std::string data = DUALPATH_DATA_DIR;
} // namespace

TEST_F(CliTest, TransposeFigure3Alpha)
{
    ASSERT_EQ(run({"transpose", "--input", data + "/figure3_alpha.json", "--gamma", path("gamma.json")}), 0);
    EXPECT_EQ(out_.str(), "{\"g\":[3,3,5,6,6],\"J\":6}\n");

    const auto gammas = read_matrix_file(path("gamma.json"));
    ASSERT_EQ(gammas.size(), 1u);
    std::vector<std::pair<int, int>> ones;
    for (std::size_t r = 0; r < gammas[0].rows(); ++r)
        for (std::size_t c = 0; c < gammas[0].cols(); ++c)
            if (gammas[0](r, c) == 1.0)
                ones.emplace_back(r + 1, c + 1);
    EXPECT_EQ(ones, (std::vector<std::pair<int, int>>{{1, 3}, {2, 3}, {3, 5}, {4, 6}, {5, 6}}));

    ASSERT_EQ(run({"transpose", "--input", data + "/figure3_soft_alpha.json"}), 0);
    EXPECT_EQ(out_.str(), "{\"g\":[3,3,5,6,6],\"J\":6}\n");
}

TEST_F(CliTest, TransposeDiagonalPathIsSelfDual)
{
    const auto in = file("diag.paths", "RWRWRWRW\n");
    ASSERT_EQ(run({"transpose", "--input", in}), 0);
    EXPECT_EQ(out_.str(), "RWRWRWRW\n");
}

TEST_F(CliTest, TransposeTwiceRestoresPathFile)
{
    for (const std::string& content : {std::string("RRWWWRWWRRW\nRRWWWRWRW\nRW\n"),
                                      std::string("{\"g\":[2,2,2,3,3,5],\"J\":5}\n{\"g\":[1,1,3],\"J\":3}\n")}) {
        const auto in = file("fwd.paths", content);
        ASSERT_EQ(run({"transpose", "--input", in, "--output", path("bwd.paths")}), 0);
        ASSERT_EQ(run({"transpose", "--input", path("bwd.paths"), "--output", path("fwd2.paths")}), 0);
        EXPECT_EQ(read_text_file(path("fwd2.paths")), content);
    }
}

TEST_F(CliTest, TransposeErrors)
{
    const auto bad = file("bad.paths", "RW\nRXW\n");
    EXPECT_EQ(run({"transpose", "--input", bad}), 1);
    EXPECT_NE(err_.str().find("line 2"), std::string::npos);

    const auto ragged = file("ragged.json", "{\"rows\":2,\"cols\":2,\"data\":[[1,0],[1]]}");
    EXPECT_EQ(run({"transpose", "--input", ragged}), 1);
    EXPECT_NE(err_.str().find("row 2"), std::string::npos);

    EXPECT_EQ(run({"transpose", "--input", path("missing.json")}), 1);
    EXPECT_EQ(run({"transpose"}), 1);
    EXPECT_EQ(run({"frobnicate"}), 1);
}

TEST_F(CliTest, TransposeMonotonization)
{
    const auto alpha = file("alpha.json", "{\"rows\":3,\"cols\":4,\"data\":[[0,0,1,0],[1,0,0,0],[0,0,0,1]]}");
    ASSERT_EQ(run({"transpose", "--input", alpha}), 0);
    EXPECT_NE(err_.str().find("warning"), std::string::npos);
    EXPECT_EQ(out_.str(), "{\"g\":[2,2,2,3],\"J\":3}\n");

    EXPECT_EQ(run({"transpose", "--input", alpha, "--strict-monotonic"}), 2);
}

TEST_F(CliTest, MetricsAppendixFixture)
{
    ASSERT_EQ(run({"metrics", "--input", data + "/appendix_a.paths", "--alignments", data + "/appendix_a.align",
                   "--corpus", data + "/appendix_a.corpus"}),
              0);
    const auto doc = report();
    EXPECT_EQ(doc["count"], 1);
    EXPECT_NEAR(doc["aggregate"]["a_suf"].get<double>(), 0.6, 1e-12);
    EXPECT_NEAR(doc["aggregate"]["a_nec"].get<double>(), 41.0 / 60.0, 1e-12);
    EXPECT_EQ(doc["sentences"][0]["aligned"], 5);
    EXPECT_EQ(doc["sentences"][0]["qualifying"], 3);

    // Without a corpus, sentence lengths come from the paths.
    ASSERT_EQ(run({"metrics", "--input", data + "/appendix_a.paths", "--alignments", data + "/appendix_a.align"}), 0);
    EXPECT_NEAR(report()["aggregate"]["a_suf"].get<double>(), 0.6, 1e-12);
}

TEST_F(CliTest, MetricsConsistencyErrors)
{
    const auto paths = file("p.paths", "RW\nRRWW\n");
    const auto align = file("a.align", "0-0\n");
    EXPECT_EQ(run({"metrics", "--input", paths, "--alignments", align}), 2);

    const auto corpus = file("c.txt", "a\tb\nc d e\tf g\n");
    EXPECT_EQ(run({"metrics", "--input", paths, "--corpus", corpus}), 2);
    EXPECT_NE(err_.str().find("record 2"), std::string::npos);

    const auto outside = file("o.align", "0-0\n5-0\n");
    EXPECT_EQ(run({"metrics", "--input", paths, "--alignments", outside}), 2);
    EXPECT_EQ(run({"metrics", "--input", paths, "--alignments", outside, "--base", "2"}), 1);
}

TEST_F(CliTest, CompareFigure1)
{
    ASSERT_EQ(run({"compare", "--input", data + "/figure1_forward.paths", "--input", data + "/figure1_backward.paths"}),
              0);
    EXPECT_EQ(report()["aggregate"]["iou"], 1.0);

    const auto fwd = file("f.paths", "{\"g\":[2,2,2,3,4],\"J\":4}\n");
    const auto bwd = file("b.paths", "{\"g\":[1,3,4,5],\"J\":5}\n");
    ASSERT_EQ(run({"compare", "--input", fwd, "--input", bwd}), 0);
    EXPECT_DOUBLE_EQ(report()["sentences"][0]["iou"].get<double>(), 12.0 / 13.0);
}

TEST_F(CliTest, CompareEmptyAndSkipped)
{
    const auto empty = file("e.paths", "");
    ASSERT_EQ(run({"compare", "--input", empty, "--input", empty}), 0);
    EXPECT_EQ(report()["count"], 0);
    EXPECT_FALSE(report().contains("aggregate"));

    const auto fwd = file("f.paths", "RRWWWRWRW\nRWRW\n");
    const auto bwd = file("b.paths", "RRRWWRWRW\nRWRWRW\n");
    ASSERT_EQ(run({"compare", "--input", fwd, "--input", bwd}), 0);
    EXPECT_EQ(report()["count"], 1);
    EXPECT_EQ(report()["skipped"], 1);
    EXPECT_NE(err_.str().find("record 2 skipped"), std::string::npos);

    const auto one = file("one.paths", "RW\n");
    EXPECT_EQ(run({"compare", "--input", fwd, "--input", one}), 2);
}

TEST_F(CliTest, CompareWithMatrices)
{
    const auto fwd = file("f.paths", "RRWWWRWWRRW\n");
    const auto bwd = file("b.paths", "RRRWWRRWRWW\n");
    const auto af = file("af.json", read_text_file(data + "/figure3_alpha.json"));
    const auto ab = file("ab.json", "{\"rows\":5,\"cols\":6,\"data\":[[0,0,1,0,0,0],[0,0,1,0,0,0],[0,0,0,0,1,0],"
                                   "[0,0,0,0,0,1],[0,0,0,0,0,1]]}");
    ASSERT_EQ(run({"compare", "--input", fwd, "--input", bwd, "--matrices", af, ab, "--lambda-dual", "2"}), 0);
    const auto doc = report();
    EXPECT_EQ(doc["sentences"][0]["iou"], 1.0);
    EXPECT_EQ(doc["sentences"][0]["omega_f"], 0.0);
    EXPECT_EQ(doc["sentences"][0]["omega_b"], 0.0);
    EXPECT_EQ(doc["metadata"]["lambda_dual"], "2");

    const auto soft = file("soft.json", read_text_file(data + "/figure3_soft_alpha.json"));
    ASSERT_EQ(run({"compare", "--input", fwd, "--input", bwd, "--matrices", soft, ab, "--lambda-dual", "2"}), 0);
    const auto s = report()["sentences"][0];
    EXPECT_GT(s["omega_f"].get<double>(), 0.0);
    EXPECT_EQ(s["omega_b"], 0.0);
    EXPECT_DOUBLE_EQ(s["total_reg"].get<double>(), 2.0 * s["omega_f"].get<double>());
}

TEST_F(CliTest, SimulateWaitKAndOracle)
{
    const auto corpus = file("c.txt", "a b c d\tw x y z\ne f g\tu v w\n");
    ASSERT_EQ(run({"simulate", "--policy", "wait_k", "--k", "1", "--corpus", corpus, "--paths", path("gen.paths")}), 0);
    EXPECT_EQ(report()["aggregate"]["al"], 1.0);
    EXPECT_EQ(read_text_file(path("gen.paths")), "RWRWRWRW\nRWRWRW\n");

    const auto align = file("a.align", "0-0 1-1 2-1 3-3\n0-0 2-2\n");
    ASSERT_EQ(run({"simulate", "--policy", "oracle_alignment", "--corpus", corpus, "--alignments", align}), 0);
    EXPECT_EQ(report()["aggregate"]["a_nec"], 1.0);
    EXPECT_EQ(report()["aggregate"]["a_suf"], 1.0);
}

TEST_F(CliTest, SimulateReplayMatchesMetrics)
{
    ASSERT_EQ(run({"simulate", "--policy", "replay", "--input", data + "/appendix_a.paths", "--alignments",
                   data + "/appendix_a.align", "--corpus", data + "/appendix_a.corpus"}),
              0);
    auto replay = report();
    ASSERT_EQ(run({"metrics", "--input", data + "/appendix_a.paths", "--alignments", data + "/appendix_a.align",
                   "--corpus", data + "/appendix_a.corpus"}),
              0);
    auto metrics = report();
    EXPECT_EQ(replay["sentences"], metrics["sentences"]);
    EXPECT_EQ(replay["aggregate"], metrics["aggregate"]);
}

TEST_F(CliTest, SimulateErrors)
{
    const auto corpus = file("c.txt", "a b\tc d\n");
    EXPECT_EQ(run({"simulate", "--policy", "wait_k", "--k", "0", "--corpus", corpus}), 1);
    EXPECT_EQ(run({"simulate", "--policy", "mma", "--corpus", corpus}), 1);
    EXPECT_EQ(run({"simulate", "--policy", "oracle_alignment", "--corpus", corpus}), 1);
    EXPECT_EQ(run({"simulate", "--policy", "replay"}), 1);
}

TEST_F(CliTest, ReportTable)
{
    ASSERT_EQ(run({"compare", "--input", data + "/figure1_forward.paths", "--input", data + "/figure1_backward.paths",
                   "--output", path("r.json")}),
              0);
    ASSERT_EQ(run({"report", "--input", path("r.json")}), 0);
    EXPECT_NE(out_.str().find("\n1\t4\t5\tNA\tNA\tNA\tNA\tNA\t1\t"), std::string::npos);
    EXPECT_NE(out_.str().find("\nmean\t"), std::string::npos);
}

TEST_F(CliTest, BinaryExitCodes)
{
    const std::string cli = DUALPATH_CLI;
    auto status = [&](const std::string& args) {
        const int raw = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(raw);
    };
    EXPECT_EQ(status("transpose --input " + data + "/figure3_alpha.json"), 0);
    EXPECT_EQ(status("transpose --input " + file("bad.paths", "RQ\n")), 1);
    EXPECT_EQ(status("metrics --input " + file("p.paths", "RW\nRW\n") + " --alignments " + file("a.align", "0-0\n")),
              2);
    EXPECT_EQ(status("--help"), 0);
}
