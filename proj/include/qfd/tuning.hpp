#pragma once

#include "qfd/data_pipeline.hpp"
#include "qfd/feature_map.hpp"
#include "qfd/kernels.hpp"
#include "qfd/models.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qfd {

enum class ModelKind { LogReg, SvcRbf, SvcFidelity, OcSvmRbf, OcSvmFidelity, OcSvmProjected };

[[nodiscard]] std::string to_string(ModelKind kind);
[[nodiscard]] ModelKind model_kind_from_string(const std::string &name);
[[nodiscard]] bool is_one_class(ModelKind kind) noexcept;
/// Kernel used by the model, nullopt for logistic regression.
[[nodiscard]] std::optional<KernelKind> kernel_of(ModelKind kind) noexcept;

struct LogUniform {
    double lo;
    double hi;
};
struct Uniform {
    double lo;
    double hi;
};
struct Discrete {
    std::vector<double> values;
};
using ParamDistribution = std::variant<LogUniform, Uniform, Discrete>;

/// Parameters are drawn per trial in name order from one seeded stream.
/// Recognized names: "C", "gamma", "nu".
struct SearchSpace {
    std::map<std::string, ParamDistribution> params;
    int n_trials = 20;
    std::uint64_t seed = 0;

    void validate() const;
    /// C ~ log-uniform[1e-2, 1e2], gamma ~ log-uniform[1e-4, 1e1], nu in {0.05, 0.10, ..., 0.50},
    /// restricted to the parameters the model kind actually uses.
    [[nodiscard]] static SearchSpace defaults_for(ModelKind kind, int n_trials, std::uint64_t seed);
};

using ParamSet = std::map<std::string, double>;

struct TrialResult {
    ParamSet params;
    std::vector<double> fold_scores;
    double mean_score = 0.0;
};

struct SearchResult {
    std::vector<TrialResult> trials;
    std::size_t best = 0;

    [[nodiscard]] const TrialResult &best_trial() const { return trials.at(best); }
};

struct TuningOptions {
    int k_folds = 5;
    std::uint64_t fold_seed = 0;
    /// Required for the quantum model kinds.
    std::optional<FeatureMapConfig> feature_map;
    SolverOptions solver;
};

/// Fold index per row. Each class is shuffled and dealt round-robin, so every
/// fold gets positives as long as there are at least k of them.
[[nodiscard]] std::vector<int> stratified_folds(std::span<const int> labels, int k_folds, std::uint64_t seed);

/**
 * Random search with k-fold cross-validated AP.
 *
 * Supervised kinds train on the k-1 remaining folds with labels. One-class
 * kinds train on the nominal rows of those folds only and are scored on the
 * full held-out fold, labels included. The best trial maximizes mean AP; ties
 * go to the earliest trial.
 */
[[nodiscard]] SearchResult random_search(const Dataset &d, ModelKind kind, const SearchSpace &space, const TuningOptions &options);

/// Cross-validated AP of a single parameter set, as computed inside random_search.
[[nodiscard]] TrialResult evaluate_params(const Dataset &d, ModelKind kind, const ParamSet &params, const TuningOptions &options);

/// 1 / (F * Var[X]) with the variance pooled over every entry of the matrix.
[[nodiscard]] double default_gamma(const RowMatrix &features);
[[nodiscard]] double default_gamma(const Dataset &d);

/// Header: trial,<param names...>,fold_1..fold_k,mean
void write_trials_csv(const std::filesystem::path &path, const SearchResult &result);

}  // namespace qfd
