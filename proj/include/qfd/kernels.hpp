#pragma once

#include "qfd/feature_map.hpp"
#include "qfd/matrix.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qfd {

enum class KernelKind { Rbf, Fidelity, Projected };

[[nodiscard]] std::string to_string(KernelKind kind);
[[nodiscard]] KernelKind kernel_kind_from_string(const std::string &name);

/**
 * Kernel selection and its parameters.
 *
 * gamma is required for RBF, optional for PROJECTED (defaults to 1/(3 n_qubits))
 * and forbidden for FIDELITY. feature_map is required exactly for the quantum kinds.
 * shots == nullopt means exact evaluation; finite shots are only meaningful for
 * FIDELITY, where the kernel is a return probability.
 */
struct KernelConfig {
    KernelKind kind = KernelKind::Rbf;
    std::optional<double> gamma;
    std::optional<FeatureMapConfig> feature_map;
    std::optional<long> shots;
    std::uint64_t shot_seed = 0;

    static KernelConfig rbf(double gamma);
    static KernelConfig fidelity(FeatureMapConfig fm, std::optional<long> shots = std::nullopt, std::uint64_t shot_seed = 0);
    static KernelConfig projected(FeatureMapConfig fm, std::optional<double> gamma = std::nullopt);

    void validate() const;
    [[nodiscard]] bool is_quantum() const noexcept { return kind != KernelKind::Rbf; }
    [[nodiscard]] bool is_exact() const noexcept { return !shots.has_value(); }
    /// gamma after applying the PROJECTED default.
    [[nodiscard]] double effective_gamma() const;

    friend bool operator==(const KernelConfig &, const KernelConfig &) = default;
};

void to_json(nlohmann::json &j, const FeatureMapConfig &c);
void from_json(const nlohmann::json &j, FeatureMapConfig &c);
void to_json(nlohmann::json &j, const KernelConfig &c);
void from_json(const nlohmann::json &j, KernelConfig &c);

struct GramMatrix {
    RowMatrix values;
    KernelConfig config;
    std::vector<std::string> row_ids;

    [[nodiscard]] Eigen::Index size() const noexcept { return values.rows(); }
};

struct GramOptions {
    /// Upper bound on memory held by cached embeddings during fidelity Gram assembly.
    std::size_t state_memory_budget = std::size_t{1} << 30;
};

[[nodiscard]] double rbf_kernel(std::span<const double> x, std::span<const double> xp, double gamma);

/// |<embed(x)|embed(x')>|^2 via two embeddings and an inner product.
[[nodiscard]] double fidelity_kernel(std::span<const double> x, std::span<const double> xp, const KernelConfig &config);

/// Same quantity as fidelity_kernel computed as the return probability
/// |<0|U(x')^dagger U(x)|0>|^2 on a single register.
[[nodiscard]] double fidelity_kernel_return_probability(std::span<const double> x, std::span<const double> xp, const KernelConfig &config);

/// <X_q>, <Y_q>, <Z_q> for every qubit q, laid out as [X_0, Y_0, Z_0, X_1, ...].
[[nodiscard]] std::vector<double> pauli_features(const Statevector &state);

[[nodiscard]] double projected_kernel(std::span<const double> x, std::span<const double> xp, const KernelConfig &config);

/// Dispatches on config.kind; exact value, no shot sampling.
[[nodiscard]] double kernel_value(std::span<const double> x, std::span<const double> xp, const KernelConfig &config);

/// Binomial(shots, exact_value) / shots.
[[nodiscard]] double sample_kernel(double exact_value, long shots, std::mt19937_64 &rng);
[[nodiscard]] double sample_kernel(double exact_value, long shots, std::uint64_t seed);

/// Seeds for shot sampling, keyed by entry position so results do not depend on evaluation order.
[[nodiscard]] std::uint64_t symmetric_entry_seed(std::uint64_t shot_seed, std::size_t i, std::size_t j);
[[nodiscard]] std::uint64_t cross_entry_seed(std::uint64_t shot_seed, std::size_t i, std::size_t j);

/// Symmetric Gram matrix. The upper triangle is evaluated and mirrored; the
/// diagonal holds the exact self-kernel and is never shot-sampled.
[[nodiscard]] GramMatrix gram(const RowMatrix &samples, const KernelConfig &config, std::vector<std::string> row_ids = {}, const GramOptions &options = {});

/// N_test x N_train matrix of kernel values.
[[nodiscard]] RowMatrix gram_cross(const RowMatrix &test_rows, const RowMatrix &train_rows, const KernelConfig &config, const GramOptions &options = {});

/// Pairwise squared Euclidean distances between rows of a and rows of b.
[[nodiscard]] RowMatrix squared_distances(const RowMatrix &a, const RowMatrix &b);

/// Rows of Pauli features (3 n_qubits columns) of every embedded sample.
[[nodiscard]] RowMatrix pauli_feature_matrix(const RowMatrix &samples, const FeatureMapConfig &fm);

}  // namespace qfd
