#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("streamsketch_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    void write(const std::string& name, const std::string& content) const { std::ofstream(path(name)) << content; }

    static std::string read(const std::string& file) {
        std::ifstream in(file);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }

    /// Runs the CLI with `args` (shell syntax) and captures stdout and stderr.
    RunResult run(const std::string& args, const std::string& env = "") const {
        const std::string err_file = path("stderr.txt");
        const std::string cmd = env + " " + STREAMSKETCH_CLI + " " + args + " 2>" + err_file;
        RunResult r;
        FILE* pipe = popen(cmd.c_str(), "r");
        if (!pipe) return r;
        char buf[4096];
        std::size_t n;
        while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
        const int status = pclose(pipe);
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.err = read(err_file);
        return r;
    }

    static std::vector<std::string> lines(const std::string& text) {
        std::vector<std::string> out;
        std::istringstream in(text);
        for (std::string line; std::getline(in, line);) out.push_back(line);
        return out;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, MidasWritesOneScorePerLine) {
    write("edges.csv", "1,2,1\n1,2,1\n3,4,2\n1,2,2\n");
    const auto r = run("midas --rows 2 --buckets 1024 < " + path("edges.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto out = lines(r.out);
    ASSERT_EQ(out.size(), 4u);
    EXPECT_EQ(out[0], "0");
}

TEST_F(CliTest, EveryEdgeSubcommandScoresEveryLine) {
    write("edges.csv", "1,2,1\n2,3,1\n1,2,2\n4,5,3\n4,5,3\n");
    for (const char* sub : {"midas", "midas-r", "midas-f", "anoedge-g", "anoedge-l"}) {
        const auto r = run(std::string(sub) + " -i " + path("edges.csv"));
        ASSERT_EQ(r.code, 0) << sub << ": " << r.err;
        EXPECT_EQ(lines(r.out).size(), 5u) << sub;
    }
}

TEST_F(CliTest, FpRateAddsFlagColumn) {
    write("edges.csv", "1,2,1\n1,2,2\n");
    const auto r = run("midas --fp-rate 0.05 -i " + path("edges.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto out = lines(r.out);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0], "0,0");
}

TEST_F(CliTest, SynthThenEvalProducesAucJson) {
    auto r = run("synth -o " + path("edges.csv") + " --labels-out " + path("labels.txt"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(read(path("edges.csv"))).size(), 10500u);
    r = run("midas-r -i " + path("edges.csv") + " -o " + path("scores.txt"));
    ASSERT_EQ(r.code, 0) << r.err;
    r = run("eval --scores " + path("scores.txt") + " --labels " + path("labels.txt"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\"auc\""), std::string::npos);
    EXPECT_NE(r.out.find("\"count\":10500"), std::string::npos);
    const auto auc = std::stod(r.out.substr(r.out.find(':') + 1));
    EXPECT_GE(auc, 0.95);
}

TEST_F(CliTest, EvalFlagOnScorer) {
    run("synth -o " + path("edges.csv") + " --labels-out " + path("labels.txt"));
    const auto r = run("midas-r --eval --labels " + path("labels.txt") + " -i " + path("edges.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\"seconds\""), std::string::npos);
    EXPECT_NE(r.out.find("\"auc\""), std::string::npos);
}

TEST_F(CliTest, AnographWindows) {
    run("synth --n-ticks 90 --burst-tick 45 -o " + path("edges.csv") + " --labels-out " + path("labels.txt"));
    auto r = run("anograph --window-ticks 30 -i " + path("edges.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out).size(), 4u);  // windows 0..3 for ticks 1..90
    r = run("anograph-k --k 3 --window-ticks 30 -i " + path("edges.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out).size(), 4u);
}

TEST_F(CliTest, MstreamExplain) {
    write("records.csv", "cat:a,num:b,tick\nx,1,1\nx,1,1\nx,1,2\n");
    auto r = run("mstream -i " + path("records.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out).size(), 3u);
    r = run("mstream --explain -i " + path("records.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto out = lines(r.out);
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(std::count(out[2].begin(), out[2].end(), ','), 3);  // total, record, a, b
}

TEST_F(CliTest, SessWithFeedback) {
    write("edges.csv", "1,2,1\n1,2,1\n1,2,2\n1,2,2\n");
    write("feedback.txt", "1,1\n");
    auto r = run("sess --feedback " + path("feedback.txt") + " -i " + path("edges.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto with = lines(r.out);
    r = run("midas-r -i " + path("edges.csv"));
    const auto without = lines(r.out);
    ASSERT_EQ(with.size(), 4u);
    EXPECT_EQ(with[1], without[1]);  // feedback applies after the labeled edge is scored
    EXPECT_GT(std::stod(with[2]), std::stod(without[2]));

    write("node.txt", "node,1,1\n");
    r = run("sess --feedback " + path("node.txt") + " -i " + path("edges.csv"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("error:"), std::string::npos);
    r = run("sess --layout 3d --feedback " + path("node.txt") + " -i " + path("edges.csv"));
    EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(CliTest, PomdpCsv) {
    const auto r = run("pomdp --p 0.001 --q 0.02 --predictor imitate --phi 0 --steps 1000000 --seeds 2");
    ASSERT_EQ(r.code, 0) << r.err;
    const auto out = lines(r.out);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0], "q_hat,phi,mean,std");
    const auto fields = out[1];
    const auto first = fields.find(','), second = fields.find(',', first + 1);
    EXPECT_NEAR(std::stod(fields.substr(second + 1)), 0.908, 0.01);

    const auto grid = run("pomdp --predictor opt --sided one --L 50,200 --phi 0,0.02 --steps 10000 --seeds 2");
    ASSERT_EQ(grid.code, 0) << grid.err;
    EXPECT_EQ(lines(grid.out).size(), 5u);
    EXPECT_EQ(lines(grid.out)[0], "L,phi,mean,std");
}

TEST_F(CliTest, SeedFromEnvironmentAndFlag) {
    const auto a = run("synth --n-background 50 --n-burst 5", "STREAMSKETCH_SEED=7");
    const auto b = run("synth --n-background 50 --n-burst 5 --seed 7");
    const auto c = run("synth --n-background 50 --n-burst 5");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, c.out);
    EXPECT_EQ(run("synth --n-background 50", "STREAMSKETCH_SEED=abc").code, 1);
}

TEST_F(CliTest, ConfigFileLosesToFlags) {
    write("edges.csv", "1,2,1\n1,2,1\n1,2,2\n");
    write("cfg.txt", "# defaults\nbuckets=1024\nrows=2\nalpha=0.9\n");
    const auto cfg = run("midas-r --config " + path("cfg.txt") + " -i " + path("edges.csv"));
    const auto flag = run("midas-r --alpha 0.9 -i " + path("edges.csv"));
    const auto both = run("midas-r --config " + path("cfg.txt") + " --alpha 0.5 -i " + path("edges.csv"));
    const auto plain = run("midas-r -i " + path("edges.csv"));
    ASSERT_EQ(cfg.code, 0) << cfg.err;
    EXPECT_EQ(cfg.out, flag.out);
    EXPECT_EQ(both.out, plain.out);
    EXPECT_NE(cfg.out, plain.out);
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    EXPECT_EQ(run("midas --no-such-flag").code, 2);
    write("bad.csv", "1,2,4\n1,2,2\n");
    const auto r = run("midas -i " + path("bad.csv"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("bad.csv"), std::string::npos) << r.err;
    EXPECT_EQ(run("midas -i " + path("missing.csv")).code, 1);
    EXPECT_EQ(run("midas-r --alpha 1.5 -i " + path("bad.csv")).code, 1);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(CliTest, DeterministicOutput) {
    run("synth -o " + path("edges.csv"));
    const auto a = run("anoedge-l -i " + path("edges.csv"));
    const auto b = run("anoedge-l -i " + path("edges.csv"));
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}
