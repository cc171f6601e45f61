#include <gtest/gtest.h>
#include <json.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

using Json = nlohmann::json;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
};

// stderr is dropped; stdout must be a single JSON document on success.
CliRun run(const std::string& args) {
    static const std::string cache = (std::filesystem::temp_directory_path() / "dworklab_test_cli").string();
    std::string cmd = std::string(DWORKLAB_CLI_PATH) + " --cache-dir " + cache + " " + args + " 2>/dev/null";
    CliRun r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

Json run_json(const std::string& args) {
    CliRun r = run(args);
    EXPECT_EQ(r.code, 0) << args;
    return Json::parse(r.out);
}

}  // namespace

TEST(Cli, RankExample) {
    Json j = run_json("rank --form \"x1^3+x1*x2^2+x2*x3*x4\"");
    EXPECT_EQ(j["rank"], 2);
    EXPECT_EQ(j["witness_variable"], 1);
}

TEST(Cli, DeltaExample) {
    Json j = run_json("delta --n 3 --k 3 --r 2");
    EXPECT_EQ(j["delta"], "1/20");
    EXPECT_EQ(j["s_threshold"], "3/10");
}

TEST(Cli, DworkCheckExample) {
    Json j = run_json("dwork-check --form \"x1^3+x2^3+x2*x3^2\"");
    EXPECT_EQ(j["dwork_regular"], false);
    EXPECT_EQ(j["failing_subset"], Json::array({3}));
    EXPECT_EQ(j["kind"], "zero_polynomial");
}

TEST(Cli, FiniteFieldAndCodim) {
    Json j = run_json("dwork-check --form \"x1^3+x2^3+x3^3\" --q 7");
    EXPECT_EQ(j["dwork_regular"], true);
    EXPECT_EQ(j["field"], "F_7");
    EXPECT_EQ(run_json("nonsingular --form \"x1^3+x2^3+x3^3\" --q 7")["nonsingular"], true);
    // characteristic divides the degree: refused rather than answered
    EXPECT_EQ(run("nonsingular --form \"x1^3+x2^3+x3^3\" --q 3").code, 1);
    Json bp = run_json("bad-primes --form \"x1^3+x2^3+x3^3\" --q-max 20");
    EXPECT_EQ(bp["excluded"], Json::array({3}));
    EXPECT_EQ(bp["bad"], Json::array());
}

TEST(Cli, CenterAndDecompose) {
    Json c = run_json("center --form \"x1^3+x2^3\"");
    EXPECT_EQ(c["dimension"], 2);
    Json d = run_json("decompose --form \"x1^3+x2^3\"");
    EXPECT_EQ(d["verdict"], "decomposable");
}

TEST(Cli, RationalsAsStrings) {
    Json p = run_json("params --n 3 --k 3 --r 2");
    EXPECT_EQ(p["kappa"], "1/10");
    EXPECT_EQ(p["lambda"], "4/5");
    EXPECT_EQ(p["sigma"], "1/2");
    EXPECT_EQ(p["consistent"], true);
}

TEST(Cli, ComplexAsPairs) {
    Json t = run_json("expsum-table --form \"x1^3\" --q 5");
    ASSERT_EQ(t["values"].size(), 25u);
    // a = b = 0 sums to q over x
    EXPECT_NEAR(t["values"][0][0].get<double>(), 5.0, 1e-9);
    EXPECT_NEAR(t["values"][0][1].get<double>(), 0.0, 1e-9);
    EXPECT_NEAR(t["parseval_sum"].get<double>(), t["parseval_expected"].get<double>(), 1e-6);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("rank --form \"x1^3+\"").code, 2);
    EXPECT_EQ(run("nosuchcommand").code, 2);
    EXPECT_EQ(run("rank --form x1^3 --bogus").code, 2);
    EXPECT_EQ(run("expsum-table --form x1^3 --q 9").code, 2);
    EXPECT_EQ(run("lower-bound --n 3 --k 3 --r 2 --j 41").code, 2);
    EXPECT_EQ(run("params --n 3 --k 3 --r 2 --set nokey=1").code, 2);
    // r = n is a well-formed request with no plan: refusal
    EXPECT_EQ(run("params --n 3 --k 3 --r 3").code, 1);
    EXPECT_EQ(run("rank --form \"x1^3+x2\"").code, 2);
}

TEST(Cli, Deterministic) {
    for (const char* args : {"decompose --form \"x1^3+x2^3\" --seed 7",
                             "boxes --n 3 --k 3 --r 2 --j 40 --quiet",
                             "lower-bound --n 3 --k 3 --r 2 --instance rl=256,Q=16 --set c5=0.2 --scan --quiet"}) {
        CliRun a = run(std::string(args) + " --threads 1");
        CliRun b = run(std::string(args) + " --threads 4");
        EXPECT_EQ(a.code, 0) << args;
        EXPECT_EQ(a.out, b.out) << args;
    }
}

TEST(Cli, ConfigFile) {
    auto path = std::filesystem::temp_directory_path() / "dworklab_test_cli.cfg";
    {
        FILE* f = fopen(path.c_str(), "w");
        ASSERT_NE(f, nullptr);
        fputs("# desk instance\nn = 3\nk = 3\nr = 2\nc5 = 0.2\ninstance = rl=256,Q=16\n", f);
        fclose(f);
    }
    Json j = run_json("lower-bound --config " + path.string() + " --scan --quiet");
    EXPECT_EQ(j["scan"]["points"], 1050);
    EXPECT_EQ(j["scan"]["E2_le_half_main"], 1050);
    std::filesystem::remove(path);
}
