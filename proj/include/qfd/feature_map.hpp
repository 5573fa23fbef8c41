#pragma once

#include "qfd/statevector.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qfd {

/**
 * IQP embedding with data re-uploading.
 *
 * One feature per qubit. Each upload applies the block
 * [H on all qubits; RZ(2*eta*x_i) on qubit i; ZZ(eta^2*x_i*x_j) for all i<j]
 * twice. Consecutive uploads are separated by a fixed, data-independent
 * interleave circuit drawn from a seeded stream, shared by every data point.
 */
struct FeatureMapConfig {
    int n_qubits = 1;
    int depth = 3;
    double eta = 0.1;
    std::uint64_t interleave_seed = 0;
    int interleave_layers = 2;

    void validate() const;

    friend bool operator==(const FeatureMapConfig &, const FeatureMapConfig &) = default;
};

[[nodiscard]] Circuit build_iqp_layer(std::span<const double> x, const FeatureMapConfig &config);

/// Interleave circuit for slot in [1, depth-1]: interleave_layers repetitions of
/// RY(theta) on every qubit followed by CZ on the ring (q, q+1 mod n).
/// Angles are keyed by (interleave_seed, slot, layer, qubit) and uniform in [0, 2pi).
[[nodiscard]] Circuit build_interleave(const FeatureMapConfig &config, int slot);

/// Full embedding circuit [IQP(x), W_1, IQP(x), ..., W_{d-1}, IQP(x)].
[[nodiscard]] Circuit build_embedding_circuit(std::span<const double> x, const FeatureMapConfig &config);

/// Caches the interleave circuits so repeated embeddings only rebuild the data blocks.
class FeatureMap {
  public:
    explicit FeatureMap(FeatureMapConfig config);

    [[nodiscard]] const FeatureMapConfig &config() const noexcept { return config_; }
    [[nodiscard]] Circuit circuit(std::span<const double> x) const;
    [[nodiscard]] Statevector embed(std::span<const double> x) const;

  private:
    FeatureMapConfig config_;
    std::vector<Circuit> interleaves_;
};

[[nodiscard]] Statevector embed(std::span<const double> x, const FeatureMapConfig &config);

}  // namespace qfd
