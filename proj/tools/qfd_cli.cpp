// qfd: command-line front end for the fraud-detection kernel toolkit.

#include "qfd/benchmark.hpp"
#include "qfd/data_pipeline.hpp"
#include "qfd/error.hpp"
#include "qfd/gram_io.hpp"
#include "qfd/kernels.hpp"
#include "qfd/resource_estimator.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>

namespace {

using qfd::RunConfig;

/// Flags that override fields of a RunConfig loaded from --config.
struct ConfigFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> dataset;
    std::optional<std::size_t> n_nominal;
    std::optional<std::size_t> n_fraud;
    std::vector<int> n_components;
    std::vector<std::string> models;
    std::optional<double> gamma;
    std::optional<double> projected_gamma;
    std::optional<double> C;
    std::optional<double> nu;
    std::optional<int> depth;
    std::optional<double> eta;
    std::optional<long> shots;
    std::optional<double> test_fraction;
    std::optional<std::string> evaluation;
    std::optional<std::string> pca_fit;
    std::optional<std::string> output_dir;
    std::optional<int> n_trials;
    std::optional<int> k_folds;
    bool tune = false;
    bool no_cache = false;
    bool record_timing = false;
};

void add_config_flags(CLI::App *cmd, ConfigFlags &f) {
    cmd->add_option("--config", f.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "Override every seed in the configuration");
    cmd->add_option("--dataset", f.dataset, "Credit-card transactions CSV");
    cmd->add_option("--n-nominal", f.n_nominal, "Nominal rows in the subsample");
    cmd->add_option("--n-fraud", f.n_fraud, "Fraud rows in the subsample");
    cmd->add_option("--n-components", f.n_components, "PCA sizes to sweep")->delimiter(',');
    cmd->add_option("--models", f.models, "Model kinds: logreg, svc-rbf, svc-fidelity, ocsvm-rbf, ocsvm-fidelity, ocsvm-projected")->delimiter(',');
    cmd->add_option("--gamma", f.gamma, "RBF gamma (default 1/(F Var[X]))");
    cmd->add_option("--projected-gamma", f.projected_gamma, "Projected-kernel gamma (default 1/(3n))");
    cmd->add_option("-C,--C", f.C, "SVC / logistic regression regularization");
    cmd->add_option("--nu", f.nu, "OC-SVM nu");
    cmd->add_option("--depth", f.depth, "Data re-uploading depth d");
    cmd->add_option("--eta", f.eta, "Feature scaling inside the embedding");
    cmd->add_option("--shots", f.shots, "Measurement shots per fidelity entry (default exact)");
    cmd->add_option("--test-fraction", f.test_fraction, "Held-out fraction of each class");
    cmd->add_option("--evaluation", f.evaluation, "held-out or train")->check(CLI::IsMember({"held-out", "train"}));
    cmd->add_option("--pca-fit", f.pca_fit, "Fit scaler/PCA on the subsample or the full file")->check(CLI::IsMember({"subsample", "full"}));
    cmd->add_option("-o,--output-dir", f.output_dir, "Directory for results");
    cmd->add_option("--n-trials", f.n_trials, "Random-search trials");
    cmd->add_option("--k-folds", f.k_folds, "Cross-validation folds");
    cmd->add_flag("--tune", f.tune, "Tune hyperparameters before each benchmark fit");
    cmd->add_flag("--no-cache", f.no_cache, "Do not read or write cached Gram matrices");
    cmd->add_flag("--record-timing", f.record_timing, "Write measured seconds into results.csv");
}

RunConfig resolve_config(const ConfigFlags &f) {
    RunConfig c = f.config_path.empty() ? RunConfig{} : qfd::load_run_config(f.config_path);
    if (f.dataset) c.dataset = *f.dataset;
    if (f.n_nominal) c.n_nominal = *f.n_nominal;
    if (f.n_fraud) c.n_fraud = *f.n_fraud;
    if (!f.n_components.empty()) c.n_components = f.n_components;
    if (!f.models.empty()) {
        c.models.clear();
        for (const std::string &m : f.models) {
            c.models.push_back(qfd::model_kind_from_string(m));
        }
    }
    if (f.gamma) c.gamma = f.gamma;
    if (f.projected_gamma) c.projected_gamma = f.projected_gamma;
    if (f.C) c.C = *f.C;
    if (f.nu) c.nu = *f.nu;
    if (f.depth) c.feature_map.depth = *f.depth;
    if (f.eta) c.feature_map.eta = *f.eta;
    if (f.shots) c.shots = f.shots;
    if (f.test_fraction) c.test_fraction = *f.test_fraction;
    if (f.evaluation) c.evaluation = *f.evaluation;
    if (f.pca_fit) c.pca_fit = *f.pca_fit;
    if (f.output_dir) c.output_dir = *f.output_dir;
    if (f.n_trials) c.tuning.n_trials = *f.n_trials;
    if (f.k_folds) c.tuning.k_folds = *f.k_folds;
    if (f.tune) c.tuning.enabled = true;
    if (f.no_cache) c.use_cache = false;
    if (f.record_timing) c.record_timing = true;
    if (f.seed) c.override_seeds(*f.seed);
    return c;
}

struct IngestFlags {
    std::string input;
    std::string output;
    std::optional<std::size_t> n_nominal;
    std::optional<std::size_t> n_fraud;
    std::uint64_t seed = 0;
    int n_components = 0;
    std::optional<double> eta;
};

int cmd_ingest(const IngestFlags &f) {
    qfd::Dataset d = qfd::load_csv(f.input);
    if (f.n_nominal || f.n_fraud) {
        d = qfd::subsample(d, f.n_nominal.value_or(0), f.n_fraud.value_or(0), f.seed);
    }
    if (f.n_components > 0) {
        const qfd::Dataset scaled = qfd::apply_scaler(d, qfd::fit_scaler(d));
        d = qfd::apply_pca(scaled, qfd::fit_pca(scaled, f.n_components));
    }
    if (f.eta) {
        d = qfd::apply_eta(d, *f.eta);
    }
    qfd::write_dataset_csv(f.output, d);
    std::cout << "wrote " << d.rows() << " rows x " << d.cols() << " features to " << f.output << '\n';
    return 0;
}

struct EstimateFlags {
    std::string profile = "sc-optimistic";
    std::uint64_t n_samples = 500;
    std::uint64_t n_queries = 0;
    std::uint64_t shots = 1000;
    std::string convention = "triangle";
    std::optional<std::uint64_t> evals;
    std::string sweep_csv;
    std::vector<std::uint64_t> sweep_samples{100, 500, 1000, 10000, 100000};
    std::vector<std::uint64_t> sweep_shots{100, 1000, 10000};
    bool list = false;
};

int cmd_estimate(const EstimateFlags &f) {
    if (f.list) {
        for (const qfd::HardwareProfile &p : qfd::builtin_profiles()) {
            std::printf("%-16s %10.3g evals/s  %s\n", p.name.c_str(), p.rate, p.notes.c_str());
        }
        return 0;
    }
    const qfd::EvalConvention convention = qfd::eval_convention_from_string(f.convention);
    if (!f.sweep_csv.empty()) {
        std::vector<qfd::EstimateRow> rows = qfd::sweep(f.sweep_samples, f.sweep_shots, qfd::builtin_profiles(), f.n_queries, convention);
        qfd::write_sweep_csv(f.sweep_csv, rows);
        std::cout << "wrote " << rows.size() << " rows to " << f.sweep_csv << '\n';
        return 0;
    }
    const qfd::HardwareProfile &profile = qfd::find_profile(f.profile);
    const qfd::WorkloadSpec spec{f.n_samples, f.n_queries, f.shots, convention};
    qfd::EstimateRow row = qfd::estimate(spec, profile);
    if (f.evals) {
        row.train_evals = *f.evals;
        row.train_seconds = qfd::wall_time(*f.evals, f.shots, profile);
    }
    std::printf("profile          %s (%.3g evals/s)\n", profile.name.c_str(), profile.rate);
    std::printf("convention       %s\n", qfd::to_string(convention).c_str());
    std::printf("shots            %llu\n", static_cast<unsigned long long>(f.shots));
    std::printf("training evals   %llu\n", static_cast<unsigned long long>(row.train_evals));
    std::printf("training time    %s (%s s)\n", qfd::format_duration(row.train_seconds).c_str(), qfd::format_double(row.train_seconds).c_str());
    if (f.n_queries > 0) {
        std::printf("inference evals  %llu\n", static_cast<unsigned long long>(row.infer_evals));
        std::printf("inference time   %s (%s s)\n", qfd::format_duration(row.infer_seconds).c_str(), qfd::format_double(row.infer_seconds).c_str());
    }
    return 0;
}

struct GramFlags {
    std::string input;
    std::string output;
    std::string kernel = "fidelity";
    std::optional<double> gamma;
    int depth = 3;
    double eta = 0.1;
    std::optional<long> shots;
    std::uint64_t seed = 0;
};

int cmd_gram(const GramFlags &f) {
    const qfd::Dataset d = qfd::read_dataset_csv(f.input);
    qfd::FeatureMapConfig fm;
    fm.n_qubits = static_cast<int>(d.cols());
    fm.depth = f.depth;
    fm.eta = f.eta;
    fm.interleave_seed = f.seed;
    qfd::KernelConfig kc;
    switch (qfd::kernel_kind_from_string(f.kernel)) {
        case qfd::KernelKind::Rbf: kc = qfd::KernelConfig::rbf(f.gamma.value_or(qfd::default_gamma(d))); break;
        case qfd::KernelKind::Fidelity: kc = qfd::KernelConfig::fidelity(fm, f.shots, f.seed); break;
        case qfd::KernelKind::Projected: kc = qfd::KernelConfig::projected(fm, f.gamma); break;
    }
    if (f.shots && kc.kind != qfd::KernelKind::Fidelity) {
        throw qfd::ValueError("--shots applies to the fidelity kernel only");
    }
    const qfd::GramMatrix g = qfd::gram(d.features, kc, d.row_ids);
    if (std::filesystem::path(f.output).extension() == ".qkgm") {
        qfd::write_gram_binary(f.output, g.values);
    } else {
        qfd::write_gram_csv(f.output, g.values, g.row_ids);
    }
    std::cout << "wrote " << g.values.rows() << "x" << g.values.cols() << " " << qfd::to_string(kc.kind) << " Gram to " << f.output << '\n';
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum-kernel anomaly detection on credit-card transactions"};
    app.require_subcommand(1);

    IngestFlags ingest;
    CLI::App *ingest_cmd = app.add_subcommand("ingest", "Load, subsample and preprocess a transactions CSV");
    ingest_cmd->add_option("-i,--input", ingest.input, "Transactions CSV")->required();
    ingest_cmd->add_option("-o,--output", ingest.output, "Output dataset CSV")->required();
    ingest_cmd->add_option("--n-nominal", ingest.n_nominal, "Nominal rows to keep");
    ingest_cmd->add_option("--n-fraud", ingest.n_fraud, "Fraud rows to keep");
    ingest_cmd->add_option("--seed", ingest.seed, "Subsample seed");
    ingest_cmd->add_option("--n-components", ingest.n_components, "Standard-scale and project onto this many principal components");
    ingest_cmd->add_option("--eta", ingest.eta, "Multiply the resulting features by eta");

    ConfigFlags bench;
    CLI::App *bench_cmd = app.add_subcommand("benchmark", "Run the model sweep and write results.csv");
    add_config_flags(bench_cmd, bench);

    ConfigFlags tune;
    CLI::App *tune_cmd = app.add_subcommand("tune", "Random-search hyperparameters per model and PCA size");
    add_config_flags(tune_cmd, tune);

    EstimateFlags est;
    CLI::App *est_cmd = app.add_subcommand("estimate", "Wall-time estimate for kernel evaluation on hardware");
    est_cmd->add_option("-p,--profile", est.profile, "Hardware profile");
    est_cmd->add_option("--n-samples", est.n_samples, "Training samples N_s");
    est_cmd->add_option("--n-queries", est.n_queries, "Query samples N_d");
    est_cmd->add_option("--shots", est.shots, "Shots per kernel evaluation");
    est_cmd->add_option("--convention", est.convention, "full, triangle or linear");
    est_cmd->add_option("--evals", est.evals, "Use this training eval count instead of the convention");
    est_cmd->add_option("--sweep-csv", est.sweep_csv, "Write a sweep over samples, shots and profiles to this CSV");
    est_cmd->add_option("--sweep-samples", est.sweep_samples, "Sample counts for --sweep-csv")->delimiter(',');
    est_cmd->add_option("--sweep-shots", est.sweep_shots, "Shot budgets for --sweep-csv")->delimiter(',');
    est_cmd->add_flag("--list-profiles", est.list, "Print the built-in hardware profiles");

    GramFlags gram;
    CLI::App *gram_cmd = app.add_subcommand("gram", "Compute a Gram matrix for a preprocessed dataset");
    gram_cmd->add_option("-i,--input", gram.input, "Dataset CSV written by ingest")->required();
    gram_cmd->add_option("-o,--output", gram.output, "Output path (.csv or .qkgm)")->required();
    gram_cmd->add_option("-k,--kernel", gram.kernel, "rbf, fidelity or projected");
    gram_cmd->add_option("--gamma", gram.gamma, "Gamma for rbf / projected");
    gram_cmd->add_option("--depth", gram.depth, "Data re-uploading depth d");
    gram_cmd->add_option("--eta", gram.eta, "Feature scaling inside the embedding");
    gram_cmd->add_option("--shots", gram.shots, "Shots per off-diagonal entry (fidelity only)");
    gram_cmd->add_option("--seed", gram.seed, "Interleave and shot seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*ingest_cmd) {
            return cmd_ingest(ingest);
        }
        if (*bench_cmd) {
            const RunConfig c = resolve_config(bench);
            const std::vector<qfd::ResultRow> rows = qfd::run_benchmark(c, &std::cerr);
            std::cout << "wrote " << rows.size() << " rows to " << (c.output_dir / "results.csv").string() << '\n';
            return 0;
        }
        if (*tune_cmd) {
            RunConfig c = resolve_config(tune);
            c.tuning.enabled = true;
            const auto reports = qfd::run_tuning(c, &std::cerr);
            std::cout << "tuned " << reports.size() << " configurations into " << c.output_dir.string() << '\n';
            return 0;
        }
        if (*est_cmd) {
            return cmd_estimate(est);
        }
        if (*gram_cmd) {
            return cmd_gram(gram);
        }
    } catch (const qfd::ConvergenceError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const qfd::Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
