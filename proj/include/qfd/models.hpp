#pragma once

#include "qfd/kernels.hpp"
#include "qfd/matrix.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace qfd {

struct SolverOptions {
    /// Stop once the maximal KKT violation m(alpha) - M(alpha) drops below this.
    double tolerance = 1e-3;
    long max_iterations = 1'000'000;
    /// Added to the Gram diagonal; lets callers regularize shot-noise-indefinite matrices.
    double diagonal_jitter = 0.0;
};

/// C-SVM trained on a precomputed Gram matrix. Labels are +1 (fraud) / -1 (nominal),
/// so the decision value is directly an anomaly score.
struct SvcModel {
    std::vector<double> alpha;
    std::vector<int> y;
    double bias = 0.0;
    double C = 1.0;
    std::vector<std::size_t> support;
    double kkt_violation = 0.0;
    long iterations = 0;
};

/// One-class SVM. Dual variables satisfy 0 <= alpha_i <= 1/(nu N) and sum alpha = 1.
struct OcSvmModel {
    std::vector<double> alpha;
    double rho = 0.0;
    double nu = 0.1;
    std::vector<std::size_t> support;
    double kkt_violation = 0.0;
    long iterations = 0;

    [[nodiscard]] double upper_bound() const noexcept { return 1.0 / (nu * static_cast<double>(alpha.size())); }
};

/// L2-regularized logistic regression on raw features; bias is unregularized.
struct LogRegModel {
    Eigen::VectorXd weights;
    double bias = 0.0;
    double C = 1.0;
};

[[nodiscard]] SvcModel train_svc(const RowMatrix &gram, std::span<const int> y, double C, const SolverOptions &options = {});
[[nodiscard]] OcSvmModel train_ocsvm(const RowMatrix &gram, double nu, const SolverOptions &options = {});

/// Sum_i alpha_i y_i k_i + b.
[[nodiscard]] double decision(const SvcModel &model, std::span<const double> k_row);
/// Sum_i alpha_i k_i - rho; negative means outside the learned support.
[[nodiscard]] double decision(const OcSvmModel &model, std::span<const double> k_row);
/// -decision, so that higher is more anomalous.
[[nodiscard]] double anomaly_score(const OcSvmModel &model, std::span<const double> k_row);

/// Maximal KKT violation of a trained model, recomputed from scratch against its Gram matrix.
/// The one-class gap is measured in the unit-box scaling alpha * nu N, the scale the solver stops on.
[[nodiscard]] double kkt_violation(const SvcModel &model, const RowMatrix &gram);
[[nodiscard]] double kkt_violation(const OcSvmModel &model, const RowMatrix &gram);

/// y in {0, 1}; minimizes 0.5|w|^2 + C sum log(1 + exp(-t_i (w.x_i + b))) with t = 2y - 1.
[[nodiscard]] LogRegModel train_logreg(const RowMatrix &features, std::span<const int> y, double C);

/// Objective value and gradient norm, exposed for verification.
[[nodiscard]] double logreg_objective(const LogRegModel &model, const RowMatrix &features, std::span<const int> y);
[[nodiscard]] double logreg_gradient_norm(const LogRegModel &model, const RowMatrix &features, std::span<const int> y);

/// Decision values of each row of k_cross (N_d x N_s).
[[nodiscard]] std::vector<double> predict_scores(const SvcModel &model, const RowMatrix &k_cross);
/// Anomaly scores (-f) of each row of k_cross.
[[nodiscard]] std::vector<double> predict_scores(const OcSvmModel &model, const RowMatrix &k_cross);
/// Fraud probability sigmoid(w.x + b) of each row.
[[nodiscard]] std::vector<double> predict_scores(const LogRegModel &model, const RowMatrix &features);

using AnyModel = std::variant<SvcModel, OcSvmModel, LogRegModel>;

/// What gets persisted: the model, the kernel it was trained with, and the training row ids.
struct ModelRecord {
    AnyModel model;
    std::optional<KernelConfig> kernel;
    std::vector<std::string> training_ids;
};

void to_json(nlohmann::json &j, const ModelRecord &record);
void from_json(const nlohmann::json &j, ModelRecord &record);

void save_model(const std::filesystem::path &path, const ModelRecord &record);
[[nodiscard]] ModelRecord load_model(const std::filesystem::path &path);

}  // namespace qfd
