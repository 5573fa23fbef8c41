#include "qfd/tuning.hpp"

#include "qfd/error.hpp"
#include "qfd/gram_io.hpp"
#include "qfd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

namespace qfd {

namespace {

using Indices = std::vector<Eigen::Index>;

double param_or(const ParamSet &params, const std::string &name, double fallback) {
    const auto it = params.find(name);
    return it == params.end() ? fallback : it->second;
}

// Full-dataset Gram matrices for one model kind, reusing whatever does not depend on trial parameters.
class KernelSource {
  public:
    KernelSource(const RowMatrix &features, ModelKind kind, const TuningOptions &options) : features_{features}, kind_{kind} {
        const std::optional<KernelKind> kk = kernel_of(kind);
        if (!kk) {
            return;
        }
        if (*kk != KernelKind::Rbf) {
            if (!options.feature_map) {
                throw ValueError(to_string(kind) + " tuning requires a feature map configuration");
            }
            fm_ = *options.feature_map;
            if (fm_->n_qubits != features.cols()) {
                throw DimensionError("feature map has " + std::to_string(fm_->n_qubits) + " qubits, data has " + std::to_string(features.cols()) + " features");
            }
        }
        switch (*kk) {
            case KernelKind::Rbf:
                distances_ = squared_distances(features, features);
                break;
            case KernelKind::Fidelity:
                fixed_ = gram(features, KernelConfig::fidelity(*fm_)).values;
                break;
            case KernelKind::Projected: {
                const RowMatrix pf = pauli_feature_matrix(features, *fm_);
                distances_ = squared_distances(pf, pf);
                break;
            }
        }
    }

    [[nodiscard]] RowMatrix matrix(const ParamSet &params) const {
        if (fixed_) {
            return *fixed_;
        }
        const double gamma = param_or(params, "gamma", default_for_gamma());
        if (!(gamma > 0.0)) {
            throw ValueError("gamma must be positive");
        }
        return (-gamma * distances_->array()).exp().matrix();
    }

    [[nodiscard]] double default_for_gamma() const {
        if (kernel_of(kind_) == KernelKind::Projected) {
            return 1.0 / (3.0 * fm_->n_qubits);
        }
        return default_gamma(features_);
    }

  private:
    const RowMatrix &features_;
    ModelKind kind_;
    std::optional<FeatureMapConfig> fm_;
    std::optional<RowMatrix> distances_;
    std::optional<RowMatrix> fixed_;
};

double sample_param(const ParamDistribution &dist, std::mt19937_64 &rng) {
    return std::visit(
        [&rng](const auto &d) -> double {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, LogUniform>) {
                std::uniform_real_distribution<double> u(std::log(d.lo), std::log(d.hi));
                return std::exp(u(rng));
            } else if constexpr (std::is_same_v<D, Uniform>) {
                std::uniform_real_distribution<double> u(d.lo, d.hi);
                return u(rng);
            } else {
                std::uniform_int_distribution<std::size_t> u(0, d.values.size() - 1);
                return d.values[u(rng)];
            }
        },
        dist);
}

TrialResult cross_validate(const Dataset &d, ModelKind kind, const ParamSet &params, const TuningOptions &options, const KernelSource &source, const std::vector<int> &folds) {
    const std::vector<int> &labels = d.require_labels();
    const double C = param_or(params, "C", 1.0);
    const double nu = param_or(params, "nu", 0.1);
    const std::optional<RowMatrix> full = kernel_of(kind) ? std::optional<RowMatrix>(source.matrix(params)) : std::nullopt;

    TrialResult result;
    result.params = params;
    for (int f = 0; f < options.k_folds; ++f) {
        Indices train;
        Indices val;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            (folds[i] == f ? val : train).push_back(static_cast<Eigen::Index>(i));
        }
        std::vector<int> val_labels;
        for (Eigen::Index i : val) {
            val_labels.push_back(labels[static_cast<std::size_t>(i)]);
        }

        std::vector<double> scores;
        if (kind == ModelKind::LogReg) {
            std::vector<int> y;
            for (Eigen::Index i : train) {
                y.push_back(labels[static_cast<std::size_t>(i)]);
            }
            const RowMatrix xt = d.features(train, Eigen::all);
            const RowMatrix xv = d.features(val, Eigen::all);
            scores = predict_scores(train_logreg(xt, y, C), xv);
        } else if (is_one_class(kind)) {
            Indices nominal;
            for (Eigen::Index i : train) {
                if (labels[static_cast<std::size_t>(i)] == 0) {
                    nominal.push_back(i);
                }
            }
            const RowMatrix k_train = (*full)(nominal, nominal);
            const RowMatrix k_val = (*full)(val, nominal);
            scores = predict_scores(train_ocsvm(k_train, nu, options.solver), k_val);
        } else {
            std::vector<int> y;
            for (Eigen::Index i : train) {
                y.push_back(labels[static_cast<std::size_t>(i)] == 1 ? 1 : -1);
            }
            const RowMatrix k_train = (*full)(train, train);
            const RowMatrix k_val = (*full)(val, train);
            scores = predict_scores(train_svc(k_train, y, C, options.solver), k_val);
        }
        result.fold_scores.push_back(average_precision(scores, val_labels));
    }
    result.mean_score = std::accumulate(result.fold_scores.begin(), result.fold_scores.end(), 0.0) / static_cast<double>(result.fold_scores.size());
    return result;
}

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::LogReg: return "logreg";
        case ModelKind::SvcRbf: return "svc-rbf";
        case ModelKind::SvcFidelity: return "svc-fidelity";
        case ModelKind::OcSvmRbf: return "ocsvm-rbf";
        case ModelKind::OcSvmFidelity: return "ocsvm-fidelity";
        case ModelKind::OcSvmProjected: return "ocsvm-projected";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string &name) {
    for (ModelKind k : {ModelKind::LogReg, ModelKind::SvcRbf, ModelKind::SvcFidelity, ModelKind::OcSvmRbf, ModelKind::OcSvmFidelity, ModelKind::OcSvmProjected}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw ValueError("unknown model kind '" + name + "' (expected logreg, svc-rbf, svc-fidelity, ocsvm-rbf, ocsvm-fidelity or ocsvm-projected)");
}

bool is_one_class(ModelKind kind) noexcept {
    return kind == ModelKind::OcSvmRbf || kind == ModelKind::OcSvmFidelity || kind == ModelKind::OcSvmProjected;
}

std::optional<KernelKind> kernel_of(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::LogReg: return std::nullopt;
        case ModelKind::SvcRbf:
        case ModelKind::OcSvmRbf: return KernelKind::Rbf;
        case ModelKind::SvcFidelity:
        case ModelKind::OcSvmFidelity: return KernelKind::Fidelity;
        case ModelKind::OcSvmProjected: return KernelKind::Projected;
    }
    return std::nullopt;
}

void SearchSpace::validate() const {
    if (n_trials < 1) {
        throw ValueError("n_trials must be >= 1");
    }
    for (const auto &[name, dist] : params) {
        if (name != "C" && name != "gamma" && name != "nu") {
            throw ValueError("unknown search parameter '" + name + "'");
        }
        std::visit(
            [&name](const auto &d) {
                using D = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<D, Discrete>) {
                    if (d.values.empty()) {
                        throw ValueError("parameter " + name + " has an empty value set");
                    }
                } else {
                    if (!(d.lo < d.hi)) {
                        throw ValueError("parameter " + name + " needs lo < hi");
                    }
                    if constexpr (std::is_same_v<D, LogUniform>) {
                        if (!(d.lo > 0.0)) {
                            throw ValueError("log-uniform parameter " + name + " needs lo > 0");
                        }
                    }
                }
            },
            dist);
    }
}

SearchSpace SearchSpace::defaults_for(ModelKind kind, int n_trials, std::uint64_t seed) {
    SearchSpace space;
    space.n_trials = n_trials;
    space.seed = seed;
    if (is_one_class(kind)) {
        space.params["nu"] = Discrete{{0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50}};
    } else {
        space.params["C"] = LogUniform{1e-2, 1e2};
    }
    const std::optional<KernelKind> kk = kernel_of(kind);
    if (kk && *kk != KernelKind::Fidelity) {
        space.params["gamma"] = LogUniform{1e-4, 1e1};
    }
    return space;
}

std::vector<int> stratified_folds(std::span<const int> labels, int k_folds, std::uint64_t seed) {
    if (k_folds < 2) {
        throw ValueError("k_folds must be >= 2");
    }
    std::vector<int> folds(labels.size(), -1);
    std::mt19937_64 rng(seed);
    // the deal continues across classes so fold sizes differ by at most one
    std::size_t next = 0;
    for (int cls : {0, 1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) {
                idx.push_back(i);
            }
        }
        if (cls == 1 && static_cast<int>(idx.size()) < k_folds) {
            throw ValueError("stratification needs at least " + std::to_string(k_folds) + " positive rows, got " + std::to_string(idx.size()) + "; some fold would have no positives");
        }
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i : idx) {
            folds[i] = static_cast<int>(next++ % static_cast<std::size_t>(k_folds));
        }
    }
    return folds;
}

SearchResult random_search(const Dataset &d, ModelKind kind, const SearchSpace &space, const TuningOptions &options) {
    space.validate();
    const std::vector<int> folds = stratified_folds(d.require_labels(), options.k_folds, options.fold_seed);
    const KernelSource source(d.features, kind, options);
    std::mt19937_64 rng(space.seed);

    SearchResult result;
    for (int t = 0; t < space.n_trials; ++t) {
        ParamSet params;
        for (const auto &[name, dist] : space.params) {
            params[name] = sample_param(dist, rng);
        }
        result.trials.push_back(cross_validate(d, kind, params, options, source, folds));
        if (result.trials.back().mean_score > result.trials[result.best].mean_score) {
            result.best = result.trials.size() - 1;
        }
    }
    return result;
}

TrialResult evaluate_params(const Dataset &d, ModelKind kind, const ParamSet &params, const TuningOptions &options) {
    const std::vector<int> folds = stratified_folds(d.require_labels(), options.k_folds, options.fold_seed);
    const KernelSource source(d.features, kind, options);
    return cross_validate(d, kind, params, options, source, folds);
}

double default_gamma(const RowMatrix &features) {
    if (features.size() == 0) {
        throw ValueError("default gamma of an empty matrix");
    }
    const double mean = features.mean();
    const double var = (features.array() - mean).square().mean();
    if (!(var > 0.0)) {
        throw ValueError("default gamma undefined: features have zero variance");
    }
    return 1.0 / (static_cast<double>(features.cols()) * var);
}

double default_gamma(const Dataset &d) {
    return default_gamma(d.features);
}

void write_trials_csv(const std::filesystem::path &path, const SearchResult &result) {
    std::ofstream out(path);
    if (!out) {
        throw SchemaError("cannot open " + path.string() + " for writing");
    }
    if (result.trials.empty()) {
        out << "trial,mean\n";
        return;
    }
    const TrialResult &first = result.trials.front();
    out << "trial";
    for (const auto &[name, value] : first.params) {
        out << ',' << name;
    }
    for (std::size_t f = 0; f < first.fold_scores.size(); ++f) {
        out << ",fold_" << (f + 1);
    }
    out << ",mean\n";
    for (std::size_t t = 0; t < result.trials.size(); ++t) {
        const TrialResult &tr = result.trials[t];
        out << t;
        for (const auto &[name, value] : tr.params) {
            out << ',' << format_double(value);
        }
        for (double s : tr.fold_scores) {
            out << ',' << format_double(s);
        }
        out << ',' << format_double(tr.mean_score) << '\n';
    }
}

}  // namespace qfd
