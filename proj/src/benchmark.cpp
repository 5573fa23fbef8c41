#include "qfd/benchmark.hpp"

#include "qfd/error.hpp"
#include "qfd/gram_io.hpp"
#include "qfd/metrics.hpp"
#include "qfd/models.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <string_view>

namespace qfd {

namespace {

using Indices = std::vector<Eigen::Index>;

// FNV-1a, 64-bit.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Indices to_eigen(const std::vector<std::size_t> &idx) {
    return {idx.begin(), idx.end()};
}

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void say(std::ostream *log, const std::string &msg) {
    if (log) {
        *log << msg << '\n' << std::flush;
    }
}

nlohmann::json tuning_to_json(const TuningConfig &t) {
    return {{"enabled", t.enabled}, {"n_trials", t.n_trials}, {"k_folds", t.k_folds}, {"seed", t.seed}};
}

template <typename T>
nlohmann::json optional_json(const std::optional<T> &v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const nlohmann::json &j, const char *key) {
    if (!j.contains(key) || j[key].is_null()) {
        return std::nullopt;
    }
    return j[key].get<T>();
}

struct ModelParams {
    double C;
    double nu;
    double gamma;
};

}  // namespace

void RunConfig::validate() const {
    if (dataset.empty()) {
        throw ValueError("run config needs a dataset path");
    }
    if (n_components.empty()) {
        throw ValueError("n_components sweep is empty");
    }
    for (int n : n_components) {
        if (n < 1 || n > kAnonymizedFeatures) {
            throw ValueError("sweep value " + std::to_string(n) + " outside [1, " + std::to_string(kAnonymizedFeatures) + "]");
        }
    }
    if (models.empty()) {
        throw ValueError("no model kinds selected");
    }
    if (evaluation != "held-out" && evaluation != "train") {
        throw ValueError("evaluation must be 'held-out' or 'train', got '" + evaluation + "'");
    }
    if (pca_fit != "subsample" && pca_fit != "full") {
        throw ValueError("pca_fit must be 'subsample' or 'full', got '" + pca_fit + "'");
    }
    if (!(C > 0.0)) {
        throw ValueError("C must be positive");
    }
    if (!(nu > 0.0 && nu <= 1.0)) {
        throw ValueError("nu must lie in (0, 1]");
    }
    if (gamma && !(*gamma > 0.0)) {
        throw ValueError("gamma must be positive");
    }
    if (projected_gamma && !(*projected_gamma > 0.0)) {
        throw ValueError("projected_gamma must be positive");
    }
    if (shots && *shots < 1) {
        throw ValueError("shots must be >= 1");
    }
    FeatureMapConfig fm = feature_map;
    fm.n_qubits = 1;
    fm.validate();
    if (tuning.enabled && (tuning.n_trials < 1 || tuning.k_folds < 2)) {
        throw ValueError("tuning needs n_trials >= 1 and k_folds >= 2");
    }
}

void RunConfig::override_seeds(std::uint64_t seed) {
    subsample_seed = seed;
    split_seed = seed;
    shot_seed = seed;
    feature_map.interleave_seed = seed;
    tuning.seed = seed;
}

void to_json(nlohmann::json &j, const RunConfig &c) {
    std::vector<std::string> models;
    for (ModelKind k : c.models) {
        models.push_back(to_string(k));
    }
    j = nlohmann::json{
        {"dataset", c.dataset.string()},
        {"n_nominal", c.n_nominal},
        {"n_fraud", c.n_fraud},
        {"subsample_seed", c.subsample_seed},
        {"n_components", c.n_components},
        {"models", models},
        {"gamma", optional_json(c.gamma)},
        {"projected_gamma", optional_json(c.projected_gamma)},
        {"C", c.C},
        {"nu", c.nu},
        {"feature_map", {{"depth", c.feature_map.depth}, {"eta", c.feature_map.eta}, {"interleave_seed", c.feature_map.interleave_seed}, {"interleave_layers", c.feature_map.interleave_layers}}},
        {"shots", c.shots ? nlohmann::json(*c.shots) : nlohmann::json("exact")},
        {"shot_seed", c.shot_seed},
        {"test_fraction", c.test_fraction},
        {"split_seed", c.split_seed},
        {"evaluation", c.evaluation},
        {"pca_fit", c.pca_fit},
        {"tuning", tuning_to_json(c.tuning)},
        {"output_dir", c.output_dir.string()},
        {"use_cache", c.use_cache},
        {"record_timing", c.record_timing},
    };
}

void from_json(const nlohmann::json &j, RunConfig &c) {
    c = RunConfig{};
    c.dataset = j.value("dataset", std::string{});
    c.n_nominal = j.value("n_nominal", c.n_nominal);
    c.n_fraud = j.value("n_fraud", c.n_fraud);
    c.subsample_seed = j.value("subsample_seed", c.subsample_seed);
    c.n_components = j.value("n_components", c.n_components);
    if (j.contains("models")) {
        c.models.clear();
        for (const auto &m : j["models"]) {
            c.models.push_back(model_kind_from_string(m.get<std::string>()));
        }
    }
    c.gamma = optional_from<double>(j, "gamma");
    c.projected_gamma = optional_from<double>(j, "projected_gamma");
    c.C = j.value("C", c.C);
    c.nu = j.value("nu", c.nu);
    if (j.contains("feature_map")) {
        const auto &fm = j["feature_map"];
        c.feature_map.depth = fm.value("depth", c.feature_map.depth);
        c.feature_map.eta = fm.value("eta", c.feature_map.eta);
        c.feature_map.interleave_seed = fm.value("interleave_seed", c.feature_map.interleave_seed);
        c.feature_map.interleave_layers = fm.value("interleave_layers", c.feature_map.interleave_layers);
    }
    if (j.contains("shots") && j["shots"].is_number_integer()) {
        c.shots = j["shots"].get<long>();
    }
    c.shot_seed = j.value("shot_seed", c.shot_seed);
    c.test_fraction = j.value("test_fraction", c.test_fraction);
    c.split_seed = j.value("split_seed", c.split_seed);
    c.evaluation = j.value("evaluation", c.evaluation);
    c.pca_fit = j.value("pca_fit", c.pca_fit);
    if (j.contains("tuning")) {
        const auto &t = j["tuning"];
        c.tuning.enabled = t.value("enabled", c.tuning.enabled);
        c.tuning.n_trials = t.value("n_trials", c.tuning.n_trials);
        c.tuning.k_folds = t.value("k_folds", c.tuning.k_folds);
        c.tuning.seed = t.value("seed", c.tuning.seed);
    }
    c.output_dir = j.value("output_dir", c.output_dir.string());
    c.use_cache = j.value("use_cache", c.use_cache);
    c.record_timing = j.value("record_timing", c.record_timing);
}

RunConfig load_run_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open config " + path.string());
    }
    try {
        return nlohmann::json::parse(in).get<RunConfig>();
    } catch (const nlohmann::json::exception &e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

void write_results_csv(const std::filesystem::path &path, const std::vector<ResultRow> &rows) {
    std::ofstream out(path);
    if (!out) {
        throw SchemaError("cannot open " + path.string() + " for writing");
    }
    out << kResultsHeader << '\n';
    for (const ResultRow &r : rows) {
        out << r.n_features << ',' << r.model << ',' << r.kernel << ',' << format_double(r.ap) << ',' << format_double(r.f1) << ',' << format_double(r.seconds) << '\n';
    }
}

PreparedData prepare_data(const RunConfig &config) {
    PreparedData data;
    data.full = load_csv(config.dataset);
    data.subsample = subsample(data.full, config.n_nominal, config.n_fraud, config.subsample_seed);
    std::tie(data.train, data.test) = stratified_split(*data.subsample.labels, config.test_fraction, config.split_seed);
    return data;
}

Dataset project(const RunConfig &config, const PreparedData &data, int n_components) {
    const Dataset &fit_source = config.pca_fit == "full" ? data.full : data.subsample;
    const ScalerParams scaler = fit_scaler(fit_source);
    const Dataset scaled_fit = apply_scaler(fit_source, scaler);
    const PcaParams pca = fit_pca(scaled_fit, n_components);
    return apply_pca(apply_scaler(data.subsample, scaler), pca);
}

KernelConfig kernel_config_for(const RunConfig &config, ModelKind kind, int n_features, double rbf_gamma) {
    FeatureMapConfig fm = config.feature_map;
    fm.n_qubits = n_features;
    switch (*kernel_of(kind)) {
        case KernelKind::Rbf: return KernelConfig::rbf(rbf_gamma);
        case KernelKind::Fidelity: return KernelConfig::fidelity(fm, config.shots, config.shot_seed);
        case KernelKind::Projected: return KernelConfig::projected(fm, config.projected_gamma);
    }
    throw ValueError("model kind has no kernel");
}

RowMatrix cached_gram(const Dataset &d, const KernelConfig &kernel, const std::optional<std::filesystem::path> &cache_dir) {
    nlohmann::json key = {{"kernel", kernel}, {"row_ids", d.row_ids}};
    for (const TransformRecord &r : d.provenance) {
        key["provenance"].push_back({{"op", r.op}, {"params", r.params}});
    }
    std::uint64_t h = fnv1a(key.dump());
    h = fnv1a(std::string_view(reinterpret_cast<const char *>(d.features.data()), static_cast<std::size_t>(d.features.size()) * sizeof(double)), h);

    std::optional<std::filesystem::path> file;
    if (cache_dir) {
        std::filesystem::create_directories(*cache_dir);
        file = *cache_dir / ("gram-" + hex(h) + ".qkgm");
        if (std::filesystem::exists(*file)) {
            RowMatrix cached = read_gram_binary(*file);
            if (cached.rows() == d.rows()) {
                return cached;
            }
        }
    }
    RowMatrix values = gram(d.features, kernel, d.row_ids).values;
    if (file) {
        write_gram_binary(*file, values);
    }
    return values;
}

std::vector<ResultRow> run_benchmark(const RunConfig &config, std::ostream *log) {
    config.validate();
    std::filesystem::create_directories(config.output_dir);
    const std::optional<std::filesystem::path> cache_dir = config.use_cache ? std::optional(config.output_dir / "cache") : std::nullopt;
    const PreparedData data = prepare_data(config);
    say(log, "subsample: " + std::to_string(data.subsample.rows()) + " rows (" + std::to_string(data.train.size()) + " train / " + std::to_string(data.test.size()) + " test)");

    const std::vector<int> &labels = *data.subsample.labels;
    const std::vector<std::size_t> &eval_rows = config.evaluation == "train" ? data.train : data.test;
    std::vector<int> eval_labels;
    for (std::size_t i : eval_rows) {
        eval_labels.push_back(labels[i]);
    }
    std::vector<std::size_t> nominal_train;
    std::vector<int> y01_train;
    std::vector<int> ypm_train;
    for (std::size_t i : data.train) {
        if (labels[i] == 0) {
            nominal_train.push_back(i);
        }
        y01_train.push_back(labels[i]);
        ypm_train.push_back(labels[i] == 1 ? 1 : -1);
    }

    std::vector<ResultRow> rows;
    std::ofstream timings(config.output_dir / "timings.csv");
    timings << "n_features,model,seconds\n";
    const auto flush_results = [&] { write_results_csv(config.output_dir / "results.csv", rows); };

    for (int n : config.n_components) {
        const Dataset proc = project(config, data, n);
        for (ModelKind kind : config.models) {
            const auto start = std::chrono::steady_clock::now();
            const std::vector<std::size_t> &fit_rows = is_one_class(kind) ? nominal_train : data.train;
            ModelParams params{config.C, config.nu, config.gamma ? *config.gamma : default_gamma(RowMatrix(proc.features(to_eigen(fit_rows), Eigen::all)))};

            if (config.tuning.enabled) {
                const Dataset train_set = select_rows(proc, data.train);
                TuningOptions opts;
                opts.k_folds = config.tuning.k_folds;
                opts.fold_seed = config.tuning.seed;
                if (kernel_of(kind) && *kernel_of(kind) != KernelKind::Rbf) {
                    FeatureMapConfig fm = config.feature_map;
                    fm.n_qubits = n;
                    opts.feature_map = fm;
                }
                const SearchResult search = random_search(train_set, kind, SearchSpace::defaults_for(kind, config.tuning.n_trials, config.tuning.seed), opts);
                const ParamSet &best = search.best_trial().params;
                params.C = best.count("C") ? best.at("C") : params.C;
                params.nu = best.count("nu") ? best.at("nu") : params.nu;
                params.gamma = best.count("gamma") ? best.at("gamma") : params.gamma;
            }

            std::vector<double> scores;
            std::string kernel_name = "none";
            if (kind == ModelKind::LogReg) {
                const RowMatrix x_train = proc.features(to_eigen(data.train), Eigen::all);
                const RowMatrix x_eval = proc.features(to_eigen(eval_rows), Eigen::all);
                scores = predict_scores(train_logreg(x_train, y01_train, params.C), x_eval);
            } else {
                KernelConfig kc = kernel_config_for(config, kind, n, params.gamma);
                if (kc.kind == KernelKind::Projected && config.tuning.enabled) {
                    kc.gamma = params.gamma;
                }
                kernel_name = to_string(kc.kind);
                const RowMatrix k_all = cached_gram(proc, kc, cache_dir);
                const RowMatrix k_fit = k_all(to_eigen(fit_rows), to_eigen(fit_rows));
                const RowMatrix k_eval = k_all(to_eigen(eval_rows), to_eigen(fit_rows));
                if (is_one_class(kind)) {
                    scores = predict_scores(train_ocsvm(k_fit, params.nu), k_eval);
                } else {
                    scores = predict_scores(train_svc(k_fit, ypm_train, params.C), k_eval);
                }
            }
            const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

            ResultRow row{n, to_string(kind), kernel_name, average_precision(scores, eval_labels), best_f1(scores, eval_labels), config.record_timing ? seconds : 0.0};
            rows.push_back(row);
            timings << n << ',' << row.model << ',' << format_double(seconds) << '\n' << std::flush;
            flush_results();
            char msg[160];
            std::snprintf(msg, sizeof msg, "N=%d %s: AP=%.4f F1=%.4f (%.2fs)", n, row.model.c_str(), row.ap, row.f1, seconds);
            say(log, msg);
        }
    }
    flush_results();
    return rows;
}

std::vector<TuneReport> run_tuning(const RunConfig &config, std::ostream *log) {
    config.validate();
    std::filesystem::create_directories(config.output_dir);
    const PreparedData data = prepare_data(config);
    std::vector<TuneReport> reports;
    nlohmann::json best = nlohmann::json::array();
    for (int n : config.n_components) {
        const Dataset train_set = select_rows(project(config, data, n), data.train);
        for (ModelKind kind : config.models) {
            TuningOptions opts;
            opts.k_folds = config.tuning.k_folds;
            opts.fold_seed = config.tuning.seed;
            if (kernel_of(kind) && *kernel_of(kind) != KernelKind::Rbf) {
                FeatureMapConfig fm = config.feature_map;
                fm.n_qubits = n;
                opts.feature_map = fm;
            }
            TuneReport report{n, kind, random_search(train_set, kind, SearchSpace::defaults_for(kind, config.tuning.n_trials, config.tuning.seed), opts)};
            write_trials_csv(config.output_dir / ("trials_" + to_string(kind) + "_N" + std::to_string(n) + ".csv"), report.search);
            const TrialResult &b = report.search.best_trial();
            best.push_back({{"n_features", n}, {"model", to_string(kind)}, {"trial", report.search.best}, {"params", b.params}, {"fold_scores", b.fold_scores}, {"mean_ap", b.mean_score}});
            char msg[160];
            std::snprintf(msg, sizeof msg, "N=%d %s: best trial %zu, mean AP=%.4f", n, to_string(kind).c_str(), report.search.best, b.mean_score);
            say(log, msg);
            reports.push_back(std::move(report));
        }
    }
    std::ofstream out(config.output_dir / "best_params.json");
    out << best.dump(2) << '\n';
    return reports;
}

}  // namespace qfd
