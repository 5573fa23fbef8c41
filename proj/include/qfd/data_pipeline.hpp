#pragma once

#include "qfd/matrix.hpp"

#include "json.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qfd {

/// One applied transform and its parameters, in application order.
struct TransformRecord {
    std::string op;
    nlohmann::json params;

    friend bool operator==(const TransformRecord &, const TransformRecord &) = default;
};

/// Feature matrix with optional 0/1 labels (1 = fraud) and a provenance trail.
struct Dataset {
    RowMatrix features;
    std::optional<std::vector<int>> labels;
    std::vector<std::string> feature_names;
    std::vector<std::string> row_ids;
    std::vector<TransformRecord> provenance;

    [[nodiscard]] Eigen::Index rows() const noexcept { return features.rows(); }
    [[nodiscard]] Eigen::Index cols() const noexcept { return features.cols(); }
    [[nodiscard]] bool has_transform(const std::string &op) const;
    /// Throws ValueError when unlabeled.
    [[nodiscard]] const std::vector<int> &require_labels() const;
    void validate() const;
};

struct ScalerParams {
    Eigen::VectorXd means;
    Eigen::VectorXd stds;
};

/// Leading principal axes of the fit set.
struct PcaParams {
    Eigen::VectorXd mean;
    /// F x N, orthonormal columns; largest-magnitude entry of each column is positive.
    Eigen::MatrixXd components;
    /// Length N, nonincreasing.
    Eigen::VectorXd explained_variance;
    /// Full covariance spectrum (length F), nonincreasing.
    Eigen::VectorXd spectrum;
};

/// Number of anonymized feature columns in the credit-card schema.
inline constexpr int kAnonymizedFeatures = 28;

/**
 * Reads a credit-card transactions CSV (Time, V1..V28, Amount, Class).
 * Keeps V1..V28 in order and Class as labels when present; Time and Amount are
 * dropped. Quoted cells are accepted. Row ids are the zero-based data-row index.
 */
[[nodiscard]] Dataset load_csv(const std::filesystem::path &path);

/// Uniform per-class selection without replacement. Selected rows keep their original order.
[[nodiscard]] Dataset subsample(const Dataset &d, std::size_t n_nominal, std::size_t n_fraud, std::uint64_t seed);

[[nodiscard]] Dataset select_rows(const Dataset &d, std::span<const std::size_t> indices);

/// Seeded stratified split: returns (train indices, test indices), each sorted.
/// test_fraction of each class (rounded) goes to the test side.
[[nodiscard]] std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(std::span<const int> labels, double test_fraction, std::uint64_t seed);

/// Population (1/N) means and standard deviations.
[[nodiscard]] ScalerParams fit_scaler(const Dataset &d);
[[nodiscard]] Dataset apply_scaler(const Dataset &d, const ScalerParams &p);

/// Requires a standard-scaled input (checked via provenance).
[[nodiscard]] PcaParams fit_pca(const Dataset &d, int n_components);
[[nodiscard]] Dataset apply_pca(const Dataset &d, const PcaParams &p);

[[nodiscard]] Dataset apply_eta(const Dataset &d, double eta);

/// Re-applies scaler, PCA and eta records to another dataset (e.g. held-out rows).
/// Row-selection records are skipped.
[[nodiscard]] Dataset replay_transforms(const Dataset &d, std::span<const TransformRecord> records);

/// Writes the features (and Class when labeled) as CSV with a header, plus
/// "<path>.provenance.json" listing the applied transforms.
void write_dataset_csv(const std::filesystem::path &path, const Dataset &d);

/// Reads back a file written by write_dataset_csv, including its provenance sidecar if present.
[[nodiscard]] Dataset read_dataset_csv(const std::filesystem::path &path);

}  // namespace qfd
