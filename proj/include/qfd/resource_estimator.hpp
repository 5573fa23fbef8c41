#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace qfd {

struct HardwareProfile {
    std::string name;
    double rate = 1.0;  ///< shots per second
    std::string notes;
};

/// sc-optimistic (1e6/s), sc-pessimistic (1e3/s), trapped-ion (1e4/s), photonic (1e10/s).
[[nodiscard]] const std::vector<HardwareProfile> &builtin_profiles();

/// Throws ValueError listing the available names when unknown.
[[nodiscard]] const HardwareProfile &find_profile(const std::string &name);

/// FULL counts N_s^2 entries, TRIANGLE the N_s(N_s-1)/2 off-diagonal pairs,
/// LINEAR the N_s evaluations of an incremental update.
enum class EvalConvention { Full, Triangle, Linear };

[[nodiscard]] std::string to_string(EvalConvention c);
[[nodiscard]] EvalConvention eval_convention_from_string(const std::string &name);

struct WorkloadSpec {
    std::uint64_t n_samples = 1;
    std::uint64_t n_queries = 0;
    std::uint64_t n_shots = 1000;
    EvalConvention convention = EvalConvention::Triangle;
};

[[nodiscard]] std::uint64_t training_evals(const WorkloadSpec &spec);
[[nodiscard]] std::uint64_t inference_evals(std::uint64_t n_queries, std::uint64_t n_samples);

/// evals * n_shots / rate, in seconds.
[[nodiscard]] double wall_time(std::uint64_t evals, std::uint64_t n_shots, const HardwareProfile &profile);

inline constexpr double kSecondsPerYear = 3.156e7;

/// Renders seconds in the largest fitting unit among s, min, h, weeks, years, e.g. "27.8 h".
[[nodiscard]] std::string format_duration(double seconds);

struct EstimateRow {
    std::string profile;
    double rate;
    std::uint64_t n_samples;
    std::uint64_t n_queries;
    std::uint64_t n_shots;
    std::uint64_t train_evals;
    std::uint64_t infer_evals;
    double train_seconds;
    double infer_seconds;
};

[[nodiscard]] EstimateRow estimate(const WorkloadSpec &spec, const HardwareProfile &profile);

/// Cartesian sweep over sample counts, shot budgets and profiles.
[[nodiscard]] std::vector<EstimateRow> sweep(std::span<const std::uint64_t> sample_counts, std::span<const std::uint64_t> shot_budgets,
                                             std::span<const HardwareProfile> profiles, std::uint64_t n_queries, EvalConvention convention);

/// Header: profile,rate,n_samples,n_queries,n_shots,train_evals,infer_evals,train_seconds,infer_seconds
void write_sweep_csv(const std::filesystem::path &path, std::span<const EstimateRow> rows);

}  // namespace qfd
