#include "oracles.hpp"

#include "qfd/benchmark.hpp"
#include "qfd/gram_io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>
#include <sys/wait.h>

using namespace qfd;

namespace {

struct CliResult {
    int code;
    std::string out;
};

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = std::filesystem::temp_directory_path() / ("qfd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        std::filesystem::remove_all(dir_);
        std::filesystem::create_directories(dir_);
        data_ = dir_ / "cc.csv";
        oracle::write_creditcard_csv(data_, 240, 20, 5);
    }
    void TearDown() override { std::filesystem::remove_all(dir_); }

    CliResult run(const std::string &args) const {
        const auto log = dir_ / "cli.log";
        const std::string cmd = std::string(QFD_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        std::ifstream in(log);
        std::stringstream ss;
        ss << in.rdbuf();
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
    }

    static std::string slurp(const std::filesystem::path &p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::string bench_args(const std::string &out) const {
        return "benchmark --dataset " + data_.string() + " --n-nominal 150 --n-fraud 12 -o " + (dir_ / out).string();
    }

    std::filesystem::path dir_;
    std::filesystem::path data_;
};

}  // namespace

TEST_F(Cli, EstimateTriangleFiveHundred) {
    const CliResult r = run("estimate --profile sc-optimistic --n-samples 500 --shots 1000 --convention triangle");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("124750"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("124.75 s"), std::string::npos) << r.out;
    const CliResult exact = run("estimate --profile sc-optimistic --evals 100000 --shots 1000");
    EXPECT_NE(exact.out.find("(100 s)"), std::string::npos) << exact.out;
}

TEST_F(Cli, EstimatePhotonicFull) {
    const CliResult r = run("estimate --profile photonic --n-samples 100000 --shots 1000 --convention full");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("16.7 min"), std::string::npos) << r.out;
}

TEST_F(Cli, EstimateUnknownProfile) {
    const CliResult r = run("estimate --profile foo");
    EXPECT_EQ(r.code, 1);
    for (const char *name : {"sc-optimistic", "sc-pessimistic", "trapped-ion", "photonic"}) {
        EXPECT_NE(r.out.find(name), std::string::npos) << r.out;
    }
}

TEST_F(Cli, EstimateSweepCsv) {
    const auto csv = dir_ / "sweep.csv";
    const CliResult r = run("estimate --sweep-csv " + csv.string() + " --sweep-samples 10,100 --sweep-shots 1000");
    EXPECT_EQ(r.code, 0) << r.out;
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header.rfind("profile,rate,", 0), 0u);
}

TEST_F(Cli, BadUsageIsUserError) {
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("benchmark --no-such-flag").code, 1);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, BenchmarkSmoke) {
    const CliResult r = run(bench_args("out") + " --n-components 2 --models ocsvm-rbf");
    ASSERT_EQ(r.code, 0) << r.out;
    std::ifstream in(dir_ / "out" / "results.csv");
    std::string header, row, extra;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_FALSE(std::getline(in, extra));
    EXPECT_EQ(header, "n_features,model,kernel,ap,f1,seconds");
    std::vector<std::string> cells;
    std::stringstream ss(row);
    for (std::string c; std::getline(ss, c, ',');) {
        cells.push_back(c);
    }
    ASSERT_EQ(cells.size(), 6u);
    EXPECT_EQ(cells[0], "2");
    EXPECT_EQ(cells[1], "ocsvm-rbf");
    EXPECT_EQ(cells[2], "rbf");
    const double ap = std::stod(cells[3]);
    EXPECT_GE(ap, 0.0);
    EXPECT_LE(ap, 1.0);
    EXPECT_TRUE(std::filesystem::exists(dir_ / "out" / "timings.csv"));
}

TEST_F(Cli, BenchmarkIsByteIdenticalAcrossRuns) {
    const std::string models = " --n-components 2,3 --models logreg,svc-rbf,ocsvm-rbf,ocsvm-fidelity,ocsvm-projected --depth 2";
    ASSERT_EQ(run(bench_args("a") + models).code, 0);
    ASSERT_EQ(run(bench_args("b") + models + " --no-cache").code, 0);
    ASSERT_EQ(run(bench_args("a") + models).code, 0);  // served from cache
    const std::string a = slurp(dir_ / "a" / "results.csv");
    EXPECT_EQ(a, slurp(dir_ / "b" / "results.csv"));
    EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 11);
    EXPECT_FALSE(std::filesystem::exists(dir_ / "b" / "cache"));
}

TEST_F(Cli, BenchmarkConfigFileAndSeedOverride) {
    // overlapping classes, so the seed visibly changes the scores
    const auto hard = dir_ / "hard.csv";
    oracle::write_creditcard_csv(hard, 240, 20, 5, 0.3);
    RunConfig c;
    c.dataset = hard;
    c.n_nominal = 150;
    c.n_fraud = 12;
    c.n_components = {2};
    c.models = {ModelKind::OcSvmFidelity};
    c.feature_map.depth = 2;
    c.shots = 500;
    c.output_dir = dir_ / "cfg";
    const auto cfg = dir_ / "run.json";
    std::ofstream(cfg) << nlohmann::json(c).dump(2);
    ASSERT_EQ(run("benchmark --config " + cfg.string()).code, 0);
    const std::string base = slurp(dir_ / "cfg" / "results.csv");
    ASSERT_EQ(run("benchmark --config " + cfg.string() + " --seed 0 -o " + (dir_ / "seed0").string()).code, 0);
    EXPECT_EQ(slurp(dir_ / "seed0" / "results.csv"), base);
    ASSERT_EQ(run("benchmark --config " + cfg.string() + " --seed 1 -o " + (dir_ / "seed1").string()).code, 0);
    EXPECT_NE(slurp(dir_ / "seed1" / "results.csv"), base);
}

TEST_F(Cli, BenchmarkUserErrors) {
    EXPECT_EQ(run(bench_args("x") + " --n-components 29").code, 1);
    EXPECT_EQ(run(bench_args("x") + " --models svm").code, 1);
    EXPECT_EQ(run("benchmark --dataset " + (dir_ / "missing.csv").string()).code, 1);
    EXPECT_EQ(run(bench_args("x") + " --n-fraud 500").code, 1);
}

TEST_F(Cli, TuneSingleTrial) {
    const std::string args = "tune --dataset " + data_.string() + " --n-nominal 150 --n-fraud 12 --n-components 2 --models svc-rbf --n-trials 1 -o ";
    ASSERT_EQ(run(args + (dir_ / "t1").string()).code, 0);
    ASSERT_EQ(run(args + (dir_ / "t2").string()).code, 0);
    const std::string trials = slurp(dir_ / "t1" / "trials_svc-rbf_N2.csv");
    EXPECT_EQ(trials, slurp(dir_ / "t2" / "trials_svc-rbf_N2.csv"));
    EXPECT_EQ(std::count(trials.begin(), trials.end(), '\n'), 2);
    const nlohmann::json best = nlohmann::json::parse(slurp(dir_ / "t1" / "best_params.json"));
    ASSERT_EQ(best.size(), 1u);
    EXPECT_EQ(best[0]["trial"], 0);
    EXPECT_EQ(best[0]["model"], "svc-rbf");
}

TEST_F(Cli, TuneSeparableFixtureReachesPerfectAp) {
    const auto sep = dir_ / "separable.csv";
    oracle::write_creditcard_csv(sep, 200, 20, 6, 8.0);
    ASSERT_EQ(run("tune --dataset " + sep.string() + " --n-nominal 150 --n-fraud 15 --n-components 2 --models svc-rbf --n-trials 20 -o " + (dir_ / "t").string()).code, 0);
    const nlohmann::json best = nlohmann::json::parse(slurp(dir_ / "t" / "best_params.json"));
    EXPECT_EQ(best[0]["mean_ap"], 1.0);
}

TEST_F(Cli, IngestThenGram) {
    const auto processed = dir_ / "processed.csv";
    ASSERT_EQ(run("ingest -i " + data_.string() + " -o " + processed.string() + " --n-nominal 20 --n-fraud 4 --seed 3 --n-components 3").code, 0);
    EXPECT_TRUE(std::filesystem::exists(processed.string() + ".provenance.json"));
    const auto gram_csv = dir_ / "k.csv";
    ASSERT_EQ(run("gram -i " + processed.string() + " -o " + gram_csv.string() + " --kernel fidelity --depth 2").code, 0);
    const LabeledMatrix k = read_gram_csv(gram_csv);
    EXPECT_EQ(k.values.rows(), 24);
    EXPECT_LE((k.values - k.values.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    const auto gram_bin = dir_ / "k.qkgm";
    ASSERT_EQ(run("gram -i " + processed.string() + " -o " + gram_bin.string() + " --kernel fidelity --depth 2").code, 0);
    EXPECT_EQ(read_gram_binary(gram_bin), k.values);
    EXPECT_EQ(run("gram -i " + processed.string() + " -o " + gram_csv.string() + " --kernel rbf --shots 10").code, 1);
}

TEST_F(Cli, CachedGramMatchesFreshComputation) {
    RunConfig c;
    c.dataset = data_;
    c.n_nominal = 60;
    c.n_fraud = 6;
    const PreparedData data = prepare_data(c);
    const Dataset d = project(c, data, 3);
    const KernelConfig kc = kernel_config_for(c, ModelKind::OcSvmFidelity, 3, 0.0);
    const auto cache = dir_ / "cache";
    const RowMatrix fresh = cached_gram(d, kc, std::nullopt);
    const RowMatrix first = cached_gram(d, kc, cache);
    ASSERT_EQ(std::distance(std::filesystem::directory_iterator(cache), {}), 1);
    const RowMatrix cached = cached_gram(d, kc, cache);
    EXPECT_LE((fresh - cached).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(first, cached);
    // A different kernel config must not hit the same entry.
    FeatureMapConfig other = *kc.feature_map;
    other.depth = 1;
    (void)cached_gram(d, KernelConfig::fidelity(other), cache);
    EXPECT_EQ(std::distance(std::filesystem::directory_iterator(cache), {}), 2);
}
