#include "qfd/kernels.hpp"

#include "qfd/error.hpp"
#include "qfd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

namespace qfd {

namespace {

void check_same_length(std::span<const double> x, std::span<const double> xp) {
    if (x.size() != xp.size()) {
        throw DimensionError("kernel arguments have lengths " + std::to_string(x.size()) + " and " + std::to_string(xp.size()));
    }
}

void require_kind(const KernelConfig &config, KernelKind kind) {
    config.validate();
    if (config.kind != kind) {
        throw ValueError("kernel config is " + to_string(config.kind) + ", expected " + to_string(kind));
    }
}

double overlap_probability(const Statevector &a, const Statevector &b) {
    return std::min(1.0, std::norm(inner_product(a, b)));
}

double gaussian_of_rows(std::span<const double> a, std::span<const double> b, double gamma) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

std::size_t states_per_tile(const FeatureMapConfig &fm, std::size_t budget, std::size_t rows) {
    const std::size_t state_bytes = (std::size_t{1} << fm.n_qubits) * sizeof(cplx);
    const std::size_t fit = budget / state_bytes;
    // one slot is kept free for the streamed state
    return std::clamp<std::size_t>(fit > 1 ? fit - 1 : 1, 1, std::max<std::size_t>(rows, 1));
}

std::vector<std::optional<Statevector>> embed_rows(const FeatureMap &map, const RowMatrix &rows, std::size_t begin, std::size_t end) {
    std::vector<std::optional<Statevector>> states(end - begin);
    const auto count = static_cast<std::int64_t>(end - begin);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t t = 0; t < count; ++t) {
        states[static_cast<std::size_t>(t)].emplace(map.embed(row_span(rows, static_cast<Eigen::Index>(begin) + t)));
    }
    return states;
}

// Upper triangle of the exact fidelity Gram, tiled to bound resident states.
void fidelity_upper(const RowMatrix &samples, const FeatureMapConfig &fm, const GramOptions &options, RowMatrix &out) {
    const FeatureMap map(fm);
    const auto n = static_cast<std::size_t>(samples.rows());
    const std::size_t tile = states_per_tile(fm, options.state_memory_budget, n);
    for (std::size_t a = 0; a < n; a += tile) {
        const std::size_t b = std::min(n, a + tile);
        const auto states = embed_rows(map, samples, a, b);
        for (std::size_t i = a; i < b; ++i) {
            for (std::size_t j = i + 1; j < b; ++j) {
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = overlap_probability(*states[i - a], *states[j - a]);
            }
        }
        const auto stream_end = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t j = static_cast<std::int64_t>(b); j < stream_end; ++j) {
            const Statevector sj = map.embed(row_span(samples, j));
            for (std::size_t i = a; i < b; ++i) {
                out(static_cast<Eigen::Index>(i), j) = overlap_probability(*states[i - a], sj);
            }
        }
    }
}

void fidelity_cross(const RowMatrix &test_rows, const RowMatrix &train_rows, const FeatureMapConfig &fm, const GramOptions &options, RowMatrix &out) {
    const FeatureMap map(fm);
    const auto n_train = static_cast<std::size_t>(train_rows.rows());
    const std::size_t tile = states_per_tile(fm, options.state_memory_budget, n_train);
    for (std::size_t a = 0; a < n_train; a += tile) {
        const std::size_t b = std::min(n_train, a + tile);
        const auto states = embed_rows(map, train_rows, a, b);
        const auto n_test = static_cast<std::int64_t>(test_rows.rows());
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t r = 0; r < n_test; ++r) {
            const Statevector sr = map.embed(row_span(test_rows, r));
            for (std::size_t i = a; i < b; ++i) {
                out(r, static_cast<Eigen::Index>(i)) = overlap_probability(sr, *states[i - a]);
            }
        }
    }
}

}  // namespace

std::string to_string(KernelKind kind) {
    switch (kind) {
        case KernelKind::Rbf: return "rbf";
        case KernelKind::Fidelity: return "fidelity";
        case KernelKind::Projected: return "projected";
    }
    return "?";
}

KernelKind kernel_kind_from_string(const std::string &name) {
    if (name == "rbf") {
        return KernelKind::Rbf;
    }
    if (name == "fidelity") {
        return KernelKind::Fidelity;
    }
    if (name == "projected") {
        return KernelKind::Projected;
    }
    throw ValueError("unknown kernel kind '" + name + "' (expected rbf, fidelity or projected)");
}

KernelConfig KernelConfig::rbf(double gamma) {
    KernelConfig c;
    c.kind = KernelKind::Rbf;
    c.gamma = gamma;
    return c;
}

KernelConfig KernelConfig::fidelity(FeatureMapConfig fm, std::optional<long> shots, std::uint64_t shot_seed) {
    KernelConfig c;
    c.kind = KernelKind::Fidelity;
    c.feature_map = fm;
    c.shots = shots;
    c.shot_seed = shot_seed;
    return c;
}

KernelConfig KernelConfig::projected(FeatureMapConfig fm, std::optional<double> gamma) {
    KernelConfig c;
    c.kind = KernelKind::Projected;
    c.feature_map = fm;
    c.gamma = gamma;
    return c;
}

void KernelConfig::validate() const {
    if (gamma && (!(*gamma > 0.0) || !std::isfinite(*gamma))) {
        throw ValueError("kernel gamma must be positive and finite");
    }
    switch (kind) {
        case KernelKind::Rbf:
            if (!gamma) {
                throw ValueError("rbf kernel requires gamma");
            }
            if (feature_map) {
                throw ValueError("rbf kernel takes no feature map");
            }
            break;
        case KernelKind::Fidelity:
            if (gamma) {
                throw ValueError("fidelity kernel takes no gamma");
            }
            [[fallthrough]];
        case KernelKind::Projected:
            if (!feature_map) {
                throw ValueError(to_string(kind) + " kernel requires a feature map");
            }
            feature_map->validate();
            break;
    }
    if (shots) {
        if (*shots < 1) {
            throw ValueError("shots must be >= 1, got " + std::to_string(*shots));
        }
        if (kind != KernelKind::Fidelity) {
            throw ValueError("shot sampling is only defined for the fidelity kernel");
        }
    }
}

double KernelConfig::effective_gamma() const {
    if (gamma) {
        return *gamma;
    }
    if (kind == KernelKind::Projected && feature_map) {
        return 1.0 / (3.0 * feature_map->n_qubits);
    }
    throw ValueError(to_string(kind) + " kernel has no gamma");
}

void to_json(nlohmann::json &j, const FeatureMapConfig &c) {
    j = nlohmann::json{{"n_qubits", c.n_qubits}, {"depth", c.depth}, {"eta", c.eta}, {"interleave_seed", c.interleave_seed}, {"interleave_layers", c.interleave_layers}};
}

void from_json(const nlohmann::json &j, FeatureMapConfig &c) {
    FeatureMapConfig d;
    c.n_qubits = j.at("n_qubits").get<int>();
    c.depth = j.value("depth", d.depth);
    c.eta = j.value("eta", d.eta);
    c.interleave_seed = j.value("interleave_seed", d.interleave_seed);
    c.interleave_layers = j.value("interleave_layers", d.interleave_layers);
}

void to_json(nlohmann::json &j, const KernelConfig &c) {
    j = nlohmann::json{{"kind", to_string(c.kind)}, {"shot_seed", c.shot_seed}};
    j["gamma"] = c.gamma ? nlohmann::json(*c.gamma) : nlohmann::json(nullptr);
    j["feature_map"] = c.feature_map ? nlohmann::json(*c.feature_map) : nlohmann::json(nullptr);
    j["shots"] = c.shots ? nlohmann::json(*c.shots) : nlohmann::json("exact");
}

void from_json(const nlohmann::json &j, KernelConfig &c) {
    c = KernelConfig{};
    c.kind = kernel_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("gamma") && !j["gamma"].is_null()) {
        c.gamma = j["gamma"].get<double>();
    }
    if (j.contains("feature_map") && !j["feature_map"].is_null()) {
        c.feature_map = j["feature_map"].get<FeatureMapConfig>();
    }
    if (j.contains("shots") && j["shots"].is_number_integer()) {
        c.shots = j["shots"].get<long>();
    }
    c.shot_seed = j.value("shot_seed", std::uint64_t{0});
}

double rbf_kernel(std::span<const double> x, std::span<const double> xp, double gamma) {
    check_same_length(x, xp);
    if (!(gamma > 0.0)) {
        throw ValueError("rbf gamma must be positive");
    }
    return gaussian_of_rows(x, xp, gamma);
}

double fidelity_kernel(std::span<const double> x, std::span<const double> xp, const KernelConfig &config) {
    require_kind(config, KernelKind::Fidelity);
    check_same_length(x, xp);
    const FeatureMap map(*config.feature_map);
    return overlap_probability(map.embed(x), map.embed(xp));
}

double fidelity_kernel_return_probability(std::span<const double> x, std::span<const double> xp, const KernelConfig &config) {
    require_kind(config, KernelKind::Fidelity);
    check_same_length(x, xp);
    const FeatureMap map(*config.feature_map);
    Statevector state = zero_state(config.feature_map->n_qubits);
    run_circuit(state, map.circuit(x));
    run_circuit(state, inverse(map.circuit(xp)));
    return std::min(1.0, std::norm(state[0]));
}

std::vector<double> pauli_features(const Statevector &state) {
    std::vector<double> f;
    f.reserve(static_cast<std::size_t>(3 * state.n_qubits()));
    for (int q = 0; q < state.n_qubits(); ++q) {
        f.push_back(pauli_expectation(state, Pauli::X, q));
        f.push_back(pauli_expectation(state, Pauli::Y, q));
        f.push_back(pauli_expectation(state, Pauli::Z, q));
    }
    return f;
}

double projected_kernel(std::span<const double> x, std::span<const double> xp, const KernelConfig &config) {
    require_kind(config, KernelKind::Projected);
    check_same_length(x, xp);
    const FeatureMap map(*config.feature_map);
    const std::vector<double> fx = pauli_features(map.embed(x));
    const std::vector<double> fxp = pauli_features(map.embed(xp));
    return gaussian_of_rows(fx, fxp, config.effective_gamma());
}

double kernel_value(std::span<const double> x, std::span<const double> xp, const KernelConfig &config) {
    config.validate();
    switch (config.kind) {
        case KernelKind::Rbf: return rbf_kernel(x, xp, *config.gamma);
        case KernelKind::Fidelity: return fidelity_kernel(x, xp, config);
        case KernelKind::Projected: return projected_kernel(x, xp, config);
    }
    return 0.0;
}

double sample_kernel(double exact_value, long shots, std::mt19937_64 &rng) {
    if (shots < 1) {
        throw ValueError("shots must be >= 1, got " + std::to_string(shots));
    }
    if (!(exact_value >= 0.0 && exact_value <= 1.0)) {
        throw ValueError("kernel value to sample must lie in [0, 1]");
    }
    std::binomial_distribution<long> draw(shots, exact_value);
    return static_cast<double>(draw(rng)) / static_cast<double>(shots);
}

double sample_kernel(double exact_value, long shots, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return sample_kernel(exact_value, shots, rng);
}

std::uint64_t symmetric_entry_seed(std::uint64_t shot_seed, std::size_t i, std::size_t j) {
    return derive_seed(shot_seed, {0, std::min(i, j), std::max(i, j)});
}

std::uint64_t cross_entry_seed(std::uint64_t shot_seed, std::size_t i, std::size_t j) {
    return derive_seed(shot_seed, {1, i, j});
}

GramMatrix gram(const RowMatrix &samples, const KernelConfig &config, std::vector<std::string> row_ids, const GramOptions &options) {
    config.validate();
    const Eigen::Index n = samples.rows();
    if (n < 1) {
        throw DimensionError("gram matrix needs at least one sample");
    }
    if (!row_ids.empty() && static_cast<Eigen::Index>(row_ids.size()) != n) {
        throw DimensionError("got " + std::to_string(row_ids.size()) + " row ids for " + std::to_string(n) + " samples");
    }
    if (row_ids.empty()) {
        row_ids.reserve(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            row_ids.push_back(std::to_string(i));
        }
    }

    RowMatrix values = RowMatrix::Identity(n, n);
    switch (config.kind) {
        case KernelKind::Rbf: {
            const double gamma = *config.gamma;
#pragma omp parallel for schedule(dynamic)
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = i + 1; j < n; ++j) {
                    values(i, j) = rbf_kernel(row_span(samples, i), row_span(samples, j), gamma);
                }
            }
            break;
        }
        case KernelKind::Fidelity:
            if (samples.cols() != config.feature_map->n_qubits) {
                throw DimensionError("samples have " + std::to_string(samples.cols()) + " features, feature map has " + std::to_string(config.feature_map->n_qubits) + " qubits");
            }
            fidelity_upper(samples, *config.feature_map, options, values);
            break;
        case KernelKind::Projected: {
            const RowMatrix features = pauli_feature_matrix(samples, *config.feature_map);
            const double gamma = config.effective_gamma();
#pragma omp parallel for schedule(dynamic)
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = i + 1; j < n; ++j) {
                    values(i, j) = gaussian_of_rows(row_span(features, i), row_span(features, j), gamma);
                }
            }
            break;
        }
    }

    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (config.shots) {
                values(i, j) = sample_kernel(values(i, j), *config.shots, symmetric_entry_seed(config.shot_seed, static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
            }
            values(j, i) = values(i, j);
        }
    }
    return GramMatrix{std::move(values), config, std::move(row_ids)};
}

RowMatrix gram_cross(const RowMatrix &test_rows, const RowMatrix &train_rows, const KernelConfig &config, const GramOptions &options) {
    config.validate();
    if (train_rows.rows() < 1) {
        throw DimensionError("cross gram needs at least one training row");
    }
    if (test_rows.rows() > 0 && test_rows.cols() != train_rows.cols()) {
        throw DimensionError("test rows have " + std::to_string(test_rows.cols()) + " features, training rows have " + std::to_string(train_rows.cols()));
    }
    const Eigen::Index nt = test_rows.rows();
    const Eigen::Index ns = train_rows.rows();
    RowMatrix out(nt, ns);
    if (nt == 0) {
        return out;
    }
    switch (config.kind) {
        case KernelKind::Rbf: {
            const double gamma = *config.gamma;
#pragma omp parallel for schedule(static)
            for (Eigen::Index r = 0; r < nt; ++r) {
                for (Eigen::Index c = 0; c < ns; ++c) {
                    out(r, c) = rbf_kernel(row_span(test_rows, r), row_span(train_rows, c), gamma);
                }
            }
            break;
        }
        case KernelKind::Fidelity:
            if (train_rows.cols() != config.feature_map->n_qubits) {
                throw DimensionError("samples have " + std::to_string(train_rows.cols()) + " features, feature map has " + std::to_string(config.feature_map->n_qubits) + " qubits");
            }
            fidelity_cross(test_rows, train_rows, *config.feature_map, options, out);
            break;
        case KernelKind::Projected: {
            const RowMatrix ft = pauli_feature_matrix(test_rows, *config.feature_map);
            const RowMatrix fs = pauli_feature_matrix(train_rows, *config.feature_map);
            const double gamma = config.effective_gamma();
#pragma omp parallel for schedule(static)
            for (Eigen::Index r = 0; r < nt; ++r) {
                for (Eigen::Index c = 0; c < ns; ++c) {
                    out(r, c) = gaussian_of_rows(row_span(ft, r), row_span(fs, c), gamma);
                }
            }
            break;
        }
    }
    if (config.shots) {
        for (Eigen::Index r = 0; r < nt; ++r) {
            for (Eigen::Index c = 0; c < ns; ++c) {
                out(r, c) = sample_kernel(out(r, c), *config.shots, cross_entry_seed(config.shot_seed, static_cast<std::size_t>(r), static_cast<std::size_t>(c)));
            }
        }
    }
    return out;
}

RowMatrix squared_distances(const RowMatrix &a, const RowMatrix &b) {
    if (a.cols() != b.cols()) {
        throw DimensionError("distance operands have " + std::to_string(a.cols()) + " and " + std::to_string(b.cols()) + " columns");
    }
    RowMatrix d(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            d(i, j) = (a.row(i) - b.row(j)).squaredNorm();
        }
    }
    return d;
}

RowMatrix pauli_feature_matrix(const RowMatrix &samples, const FeatureMapConfig &fm) {
    if (samples.rows() > 0 && samples.cols() != fm.n_qubits) {
        throw DimensionError("samples have " + std::to_string(samples.cols()) + " features, feature map has " + std::to_string(fm.n_qubits) + " qubits");
    }
    const FeatureMap map(fm);
    RowMatrix out(samples.rows(), 3 * fm.n_qubits);
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
        const std::vector<double> f = pauli_features(map.embed(row_span(samples, i)));
        for (std::size_t k = 0; k < f.size(); ++k) {
            out(i, static_cast<Eigen::Index>(k)) = f[k];
        }
    }
    return out;
}

}  // namespace qfd
