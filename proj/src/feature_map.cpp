#include "qfd/feature_map.hpp"

#include "qfd/error.hpp"
#include "qfd/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

namespace qfd {

void FeatureMapConfig::validate() const {
    if (n_qubits < 1) {
        throw ValueError("feature map needs at least one qubit");
    }
    if (n_qubits > kMaxQubits) {
        throw CapacityError("feature map width " + std::to_string(n_qubits) + " exceeds the limit of " + std::to_string(kMaxQubits));
    }
    if (depth < 1) {
        throw ValueError("re-uploading depth must be >= 1, got " + std::to_string(depth));
    }
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw ValueError("eta must be positive and finite");
    }
    if (interleave_layers < 1) {
        throw ValueError("interleave_layers must be >= 1, got " + std::to_string(interleave_layers));
    }
}

Circuit build_iqp_layer(std::span<const double> x, const FeatureMapConfig &config) {
    config.validate();
    const int n = config.n_qubits;
    if (static_cast<int>(x.size()) != n) {
        throw DimensionError("feature vector has " + std::to_string(x.size()) + " entries, feature map expects " + std::to_string(n));
    }
    std::vector<double> scaled(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) {
            throw ValueError("feature " + std::to_string(i) + " is not finite");
        }
        scaled[i] = config.eta * x[i];
    }

    Circuit c{n, {}};
    c.gates.reserve(static_cast<std::size_t>(2 * (2 * n + n * (n - 1) / 2)));
    for (int rep = 0; rep < 2; ++rep) {
        for (int q = 0; q < n; ++q) {
            c.append(Gate::h(q));
        }
        for (int q = 0; q < n; ++q) {
            c.append(Gate::rz(q, 2.0 * scaled[q]));
        }
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                c.append(Gate::zz(i, j, scaled[i] * scaled[j]));
            }
        }
    }
    return c;
}

Circuit build_interleave(const FeatureMapConfig &config, int slot) {
    config.validate();
    if (slot < 1 || slot > config.depth - 1) {
        throw IndexError("interleave slot " + std::to_string(slot) + " outside [1, " + std::to_string(config.depth - 1) + "]");
    }
    const int n = config.n_qubits;
    Circuit c{n, {}};
    for (int layer = 0; layer < config.interleave_layers; ++layer) {
        for (int q = 0; q < n; ++q) {
            const std::uint64_t bits = derive_seed(config.interleave_seed, {static_cast<std::uint64_t>(slot), static_cast<std::uint64_t>(layer), static_cast<std::uint64_t>(q)});
            c.append(Gate::ry(q, 2.0 * std::numbers::pi * unit_interval(bits)));
        }
        // On two qubits the ring has a single edge; CZ(0,1)CZ(1,0) would cancel.
        if (n == 2) {
            c.append(Gate::cz(0, 1));
        } else if (n > 2) {
            for (int q = 0; q < n; ++q) {
                c.append(Gate::cz(q, (q + 1) % n));
            }
        }
    }
    return c;
}

FeatureMap::FeatureMap(FeatureMapConfig config) : config_{std::move(config)} {
    config_.validate();
    for (int slot = 1; slot < config_.depth; ++slot) {
        interleaves_.push_back(build_interleave(config_, slot));
    }
}

Circuit FeatureMap::circuit(std::span<const double> x) const {
    const Circuit block = build_iqp_layer(x, config_);
    Circuit full{config_.n_qubits, {}};
    for (int upload = 0; upload < config_.depth; ++upload) {
        if (upload > 0) {
            full.append(interleaves_[static_cast<std::size_t>(upload - 1)]);
        }
        full.append(block);
    }
    return full;
}

Statevector FeatureMap::embed(std::span<const double> x) const {
    const Circuit block = build_iqp_layer(x, config_);
    Statevector state = zero_state(config_.n_qubits);
    for (int upload = 0; upload < config_.depth; ++upload) {
        if (upload > 0) {
            run_circuit(state, interleaves_[static_cast<std::size_t>(upload - 1)]);
        }
        run_circuit(state, block);
    }
    return state;
}

Circuit build_embedding_circuit(std::span<const double> x, const FeatureMapConfig &config) {
    return FeatureMap(config).circuit(x);
}

Statevector embed(std::span<const double> x, const FeatureMapConfig &config) {
    return FeatureMap(config).embed(x);
}

}  // namespace qfd
