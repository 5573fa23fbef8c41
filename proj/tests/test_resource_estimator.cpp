#include "qfd/error.hpp"
#include "qfd/resource_estimator.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace qfd;

namespace {

const HardwareProfile &profile(const std::string &name) { return find_profile(name); }

}  // namespace

TEST(Profiles, BuiltinRates) {
    EXPECT_EQ(profile("sc-optimistic").rate, 1e6);
    EXPECT_EQ(profile("sc-pessimistic").rate, 1e3);
    EXPECT_EQ(profile("trapped-ion").rate, 1e4);
    EXPECT_EQ(profile("photonic").rate, 1e10);
    try {
        (void)find_profile("foo");
        FAIL() << "expected ValueError";
    } catch (const ValueError &e) {
        const std::string msg = e.what();
        for (const HardwareProfile &p : builtin_profiles()) {
            EXPECT_NE(msg.find(p.name), std::string::npos) << msg;
        }
    }
}

TEST(TrainingEvals, Conventions) {
    EXPECT_EQ(training_evals({500, 0, 1000, EvalConvention::Triangle}), 124750u);
    EXPECT_EQ(training_evals({100000, 0, 1000, EvalConvention::Full}), 10'000'000'000u);
    EXPECT_EQ(training_evals({1, 0, 1, EvalConvention::Triangle}), 0u);
    EXPECT_EQ(training_evals({1, 0, 1, EvalConvention::Full}), 1u);
    EXPECT_EQ(training_evals({1, 0, 1, EvalConvention::Linear}), 1u);
    EXPECT_EQ(training_evals({700, 0, 1, EvalConvention::Linear}), 700u);
}

TEST(InferenceEvals, Product) {
    EXPECT_EQ(inference_evals(1, 500), 500u);
    EXPECT_EQ(inference_evals(0, 500), 0u);
    EXPECT_EQ(inference_evals(1, 100000), 100000u);
}

TEST(WallTime, DiscussionFigures) {
    EXPECT_DOUBLE_EQ(wall_time(100000, 1000, profile("sc-optimistic")), 100.0);
    EXPECT_DOUBLE_EQ(wall_time(100000, 1000000, profile("sc-optimistic")), 1e5);
    EXPECT_DOUBLE_EQ(wall_time(100000, 1000, profile("trapped-ion")), 1e4);
    EXPECT_DOUBLE_EQ(wall_time(10'000'000'000, 1000, profile("trapped-ion")), 1e9);
    EXPECT_DOUBLE_EQ(wall_time(10'000'000'000, 1000, profile("sc-optimistic")), 1e7);
    EXPECT_DOUBLE_EQ(wall_time(100000, 1000, profile("photonic")), 1e-2);
    EXPECT_DOUBLE_EQ(wall_time(10'000'000'000, 1000, profile("photonic")), 1e3);
    EXPECT_DOUBLE_EQ(wall_time(500, 1000, profile("sc-optimistic")), 0.5);
}

TEST(WallTime, LinearInEachArgument) {
    const HardwareProfile p{"custom", 2.5e5, ""};
    const HardwareProfile fast{"custom2", 5e5, ""};
    const double base = wall_time(1234, 567, p);
    EXPECT_DOUBLE_EQ(wall_time(2468, 567, p), 2 * base);
    EXPECT_DOUBLE_EQ(wall_time(1234, 1701, p), 3 * base);
    EXPECT_DOUBLE_EQ(wall_time(1234, 567, fast), base / 2);
}

TEST(FormatDuration, Units) {
    EXPECT_EQ(format_duration(100.0), "1.67 min");
    EXPECT_EQ(format_duration(1e5), "27.8 h");
    EXPECT_EQ(format_duration(1e4), "2.78 h");
    EXPECT_EQ(format_duration(1e9), "31.7 years");
    EXPECT_EQ(format_duration(1e7), "16.5 weeks");
    EXPECT_EQ(format_duration(1e-2), "10 ms");
    EXPECT_EQ(format_duration(1e3), "16.7 min");
    EXPECT_EQ(format_duration(0.5), "500 ms");
    EXPECT_EQ(format_duration(42.0), "42 s");
}

TEST(Estimate, RowAndSweepCsv) {
    const EstimateRow row = estimate({500, 10, 1000, EvalConvention::Triangle}, profile("sc-optimistic"));
    EXPECT_EQ(row.train_evals, 124750u);
    EXPECT_EQ(row.infer_evals, 5000u);
    EXPECT_DOUBLE_EQ(row.train_seconds, 124.75);
    EXPECT_DOUBLE_EQ(row.infer_seconds, 5.0);

    const std::vector<std::uint64_t> samples{100, 1000};
    const std::vector<std::uint64_t> shots{1000};
    const std::vector<EstimateRow> rows = sweep(samples, shots, builtin_profiles(), 1, EvalConvention::Full);
    EXPECT_EQ(rows.size(), 2u * builtin_profiles().size());
    const auto path = std::filesystem::temp_directory_path() / "qfd_sweep.csv";
    write_sweep_csv(path, rows);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "profile,rate,n_samples,n_queries,n_shots,train_evals,infer_evals,train_seconds,infer_seconds");
    int lines = 0;
    for (std::string line; std::getline(in, line);) {
        ++lines;
    }
    EXPECT_EQ(lines, static_cast<int>(rows.size()));
    std::filesystem::remove(path);
}

TEST(Convention, Names) {
    for (EvalConvention c : {EvalConvention::Full, EvalConvention::Triangle, EvalConvention::Linear}) {
        EXPECT_EQ(eval_convention_from_string(to_string(c)), c);
    }
    EXPECT_THROW((void)eval_convention_from_string("square"), ValueError);
}
