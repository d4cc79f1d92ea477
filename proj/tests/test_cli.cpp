#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "lesc/bench.hpp"

#ifndef LESC_CLI_PATH
#error "LESC_CLI_PATH must point at the lesc binary"
#endif

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(LESC_CLI_PATH) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    fs::path dir;
    fs::path small;

    void SetUp() override {
        dir = fs::temp_directory_path() / ("lesc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        small = dir / "small.ldl";
        lesc::save_dataset(lesc::subsample(lesc::generate_artificial(), 80, 3), small);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string p(const std::string& name) const { return (dir / name).string(); }
};

} // namespace

TEST_F(Cli, SynthIsReproducible) {
    ASSERT_EQ(run("synth --out " + p("a.ldl")).code, 0);
    ASSERT_EQ(run("synth --out " + p("b.ldl")).code, 0);
    const auto a = slurp(p("a.ldl"));
    EXPECT_EQ(a, slurp(p("b.ldl")));
    EXPECT_EQ(a.substr(0, a.find('\n')), "#ldl 3 3 2601");
}

TEST_F(Cli, EvaluateIdenticalPair) {
    const auto r = run("evaluate --truth " + small.string() + " --recovered " + small.string());
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out, "dataset,cheb,canber,clark,kl,cosine,intersec\nsmall,0,0,0,0,1,1\n");
    ASSERT_EQ(run("evaluate --truth " + small.string() + " --recovered " + small.string() + " --out " + p("m.csv")).code, 0);
    EXPECT_EQ(slurp(p("m.csv")), r.out);
}

TEST_F(Cli, BinarizeWritesLogicalFile) {
    ASSERT_EQ(run("binarize --data " + small.string() + " --out " + p("l.logical") + " --strategy topk --k 2").code, 0);
    const auto L = lesc::load_logical(p("l.logical")).matrix();
    EXPECT_EQ(L.cols(), 80);
    EXPECT_EQ(L.sum(), 160.0);
}

TEST_F(Cli, EnhanceAndReplay) {
    const auto r = run("enhance --data " + small.string() + " --method glesc --lambda1 0.01,1 --lambda2 0.1 --threads 1 --out " +
                       p("rec.ldl") + " --manifest " + p("run.json"));
    ASSERT_EQ(r.code, 0) << r.out;
    const auto rec = lesc::load_dataset(p("rec.ldl"));
    EXPECT_EQ(rec.num_instances(), 80);
    EXPECT_EQ(rec.features(), lesc::load_dataset(small).features());
    const auto manifest = lesc::bench::json::parse(slurp(p("run.json")));
    EXPECT_EQ(manifest.at("method"), "glesc");

    const auto again = run("enhance --replay " + p("run.json") + " --out " + p("rec2.ldl"));
    ASSERT_EQ(again.code, 0) << again.out;
    EXPECT_EQ(slurp(p("rec.ldl")), slurp(p("rec2.ldl")));

    const auto ev = run("evaluate --truth " + small.string() + " --recovered " + p("rec.ldl"));
    ASSERT_EQ(ev.code, 0) << ev.out;
    EXPECT_NE(ev.out.find("\nsmall,0."), std::string::npos);
}

TEST_F(Cli, EnhanceWithLabelFile) {
    ASSERT_EQ(run("binarize --data " + small.string() + " --out " + p("l.logical")).code, 0);
    const auto r = run("enhance --data " + small.string() + " --method lp --labels " + p("l.logical") + " --out " + p("lp.ldl"));
    ASSERT_EQ(r.code, 0) << r.out;
    const auto direct = run("enhance --data " + small.string() + " --method lp --out " + p("lp2.ldl"));
    ASSERT_EQ(direct.code, 0) << direct.out;
    EXPECT_EQ(slurp(p("lp.ldl")), slurp(p("lp2.ldl")));
}

TEST_F(Cli, ExitCodes) {
    EXPECT_EQ(run("enhance --data " + small.string() + " --method bogus --out " + p("x.ldl")).code, 2);
    EXPECT_EQ(run("enhance --data " + small.string() + " --lambda1 -1 --out " + p("x.ldl")).code, 2);
    EXPECT_EQ(run("nosuchcommand").code, 2);
    EXPECT_EQ(run("evaluate --truth " + small.string()).code, 2);
    { std::ofstream(p("bad.ldl")) << "#ldl 1 2\n"; }
    const auto bad = run("evaluate --truth " + p("bad.ldl") + " --recovered " + small.string());
    EXPECT_EQ(bad.code, 3);
    EXPECT_NE(bad.out.find("line 1"), std::string::npos) << bad.out;
    EXPECT_EQ(run("evaluate --truth " + p("missing.ldl") + " --recovered " + small.string()).code, 3);
    const auto other = lesc::subsample(lesc::load_dataset(small), 10, 1);
    lesc::save_dataset(other, p("ten.ldl"));
    EXPECT_EQ(run("evaluate --truth " + small.string() + " --recovered " + p("ten.ldl")).code, 2);
}

TEST_F(Cli, DegradedRunExitsFour) {
    const auto r = run("enhance --data " + small.string() + " --method lesc --max-iter 2 --out " + p("d.ldl"));
    EXPECT_EQ(r.code, 4) << r.out;
    EXPECT_TRUE(fs::exists(p("d.ldl")));
}

TEST_F(Cli, SweepRowCount) {
    const auto r = run("sweep --data " + small.string() + " --method lesc --lambda1 0.001,0.1,10 --lambda2 0.01,1 --subsample 40 --seed 2 --out " +
                       p("sweep.csv") + " --manifest " + p("sweep.json"));
    ASSERT_EQ(r.code, 0) << r.out;
    const auto csv = slurp(p("sweep.csv"));
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "dataset,method,lambda1,lambda2,cheb,canber,clark,kl,cosine,intersec,solver_iterations,solver_converged,lbfgs_iterations,wall_seconds");
    EXPECT_EQ(run("sweep --data " + small.string() + " --method lp --out " + p("s.csv")).code, 2);
}

TEST_F(Cli, BenchmarkWritesReports) {
    lesc::save_dataset(lesc::subsample(lesc::generate_artificial(), 60, 9), p("other.ldl"));
    const auto r = run("benchmark --data " + small.string() + " " + p("other.ldl") +
                       " --methods lp,lesc,glesc --lambda1 0.01,1 --lambda2 0.1 --out " + p("bench"));
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("Avg.Rank"), std::string::npos);
    EXPECT_TRUE(fs::exists(p("bench.csv")));
    EXPECT_NE(r.out.find(slurp(p("bench.txt"))), std::string::npos);
    const auto manifest = lesc::bench::json::parse(slurp(p("bench.manifest.json")));
    EXPECT_EQ(manifest.at("runs").size(), 6u);
}
