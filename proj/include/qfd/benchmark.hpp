#pragma once

#include "qfd/data_pipeline.hpp"
#include "qfd/feature_map.hpp"
#include "qfd/kernels.hpp"
#include "qfd/tuning.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qfd {

struct TuningConfig {
    bool enabled = false;
    int n_trials = 20;
    int k_folds = 5;
    std::uint64_t seed = 0;
};

/**
 * Everything that determines a benchmark run. Every seed is explicit, so a
 * config fully determines the output artifacts.
 *
 * The feature map's eta scales the PCA features inside the embedding; the
 * benchmark does not pre-scale the data a second time.
 */
struct RunConfig {
    std::filesystem::path dataset;
    std::size_t n_nominal = 500;
    std::size_t n_fraud = 25;
    std::uint64_t subsample_seed = 0;
    std::vector<int> n_components{2, 5, 10, 15, 20};
    std::vector<ModelKind> models{ModelKind::OcSvmRbf};

    /// RBF gamma; nullopt selects 1/(F Var[X]) on the training rows.
    std::optional<double> gamma;
    /// Projected-kernel gamma; nullopt selects 1/(3 n_qubits).
    std::optional<double> projected_gamma;
    double C = 1.0;
    double nu = 0.1;
    FeatureMapConfig feature_map;
    std::optional<long> shots;
    std::uint64_t shot_seed = 0;

    double test_fraction = 0.3;
    std::uint64_t split_seed = 0;
    /// "held-out" scores the test split; "train" scores the training rows.
    std::string evaluation = "held-out";
    /// "subsample" fits scaler and PCA on the subsample, "full" on the whole input file.
    std::string pca_fit = "subsample";

    TuningConfig tuning;
    std::filesystem::path output_dir = "results";
    bool use_cache = true;
    /// Write measured seconds into the results CSV. Off by default so reruns are byte-identical.
    bool record_timing = false;

    void validate() const;
    /// Replaces every seed in the config with one value.
    void override_seeds(std::uint64_t seed);
};

void to_json(nlohmann::json &j, const RunConfig &c);
void from_json(const nlohmann::json &j, RunConfig &c);

[[nodiscard]] RunConfig load_run_config(const std::filesystem::path &path);

struct ResultRow {
    int n_features = 0;
    std::string model;
    std::string kernel;
    double ap = 0.0;
    double f1 = 0.0;
    double seconds = 0.0;
};

inline constexpr const char *kResultsHeader = "n_features,model,kernel,ap,f1,seconds";

void write_results_csv(const std::filesystem::path &path, const std::vector<ResultRow> &rows);

/// Subsample and its stratified train/test split.
struct PreparedData {
    Dataset full;
    Dataset subsample;
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

[[nodiscard]] PreparedData prepare_data(const RunConfig &config);

/// Standard-scale then PCA(n_components) on the subsample, with parameters fit per config.pca_fit.
[[nodiscard]] Dataset project(const RunConfig &config, const PreparedData &data, int n_components);

/// Kernel configuration the benchmark uses for a model kind on n_features inputs.
/// gamma is the resolved RBF gamma (ignored by other kinds).
[[nodiscard]] KernelConfig kernel_config_for(const RunConfig &config, ModelKind kind, int n_features, double rbf_gamma);

/// Symmetric Gram over all rows of d, read from or written to the cache directory when enabled.
/// The cache key hashes the dataset contents, its provenance and the kernel config.
[[nodiscard]] RowMatrix cached_gram(const Dataset &d, const KernelConfig &kernel, const std::optional<std::filesystem::path> &cache_dir);

/// Runs the sweep, writes <output_dir>/results.csv (and timings.csv), returns the rows.
/// Progress goes to log when given.
std::vector<ResultRow> run_benchmark(const RunConfig &config, std::ostream *log = nullptr);

struct TuneReport {
    int n_features;
    ModelKind model;
    SearchResult search;
};

/// Random search on the training split per (N, model); writes trials_<model>_N<N>.csv and best_params.json.
std::vector<TuneReport> run_tuning(const RunConfig &config, std::ostream *log = nullptr);

}  // namespace qfd
