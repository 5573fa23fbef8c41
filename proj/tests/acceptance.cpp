// Acceptance suite: prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero if any criterion fails.

#include "oracles.hpp"

#include "qfd/benchmark.hpp"
#include "qfd/kernels.hpp"
#include "qfd/metrics.hpp"
#include "qfd/models.hpp"
#include "qfd/resource_estimator.hpp"
#include "qfd/rng.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

using namespace qfd;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
    Status status;
    std::string detail;
};

Outcome pass(std::string d) { return {Status::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Status::Fail, std::move(d)}; }

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 1. Eight wall-time figures within 15% of the quoted values.
Outcome resource_figures() {
    struct Case {
        const char *label;
        std::uint64_t evals;
        std::uint64_t shots;
        const char *profile;
        double quoted;
    };
    constexpr double hour = 3600, week = 7 * 86400.0;
    const Case cases[] = {
        {"100 s", 100000, 1000, "sc-optimistic", 100.0},
        {"28 h", 100000, 1000000, "sc-optimistic", 28 * hour},
        {"3 h", 100000, 1000, "trapped-ion", 3 * hour},
        {"30 y", 10'000'000'000, 1000, "trapped-ion", 30 * kSecondsPerYear},
        {"16 wk", 10'000'000'000, 1000, "sc-optimistic", 16 * week},
        {"10 ms", 100000, 1000, "photonic", 0.01},
        {"17 min", 10'000'000'000, 1000, "photonic", 17 * 60.0},
        {"0.5 s", 500, 1000, "sc-optimistic", 0.5},
    };
    double worst = 0;
    std::string worst_label;
    for (const Case &c : cases) {
        const double err = std::abs(wall_time(c.evals, c.shots, find_profile(c.profile)) - c.quoted) / c.quoted;
        if (err > worst) {
            worst = err;
            worst_label = c.label;
        }
    }
    const std::string d = fmt("8 figures, max relative error %.1f%% (%s)", 100 * worst, worst_label.c_str());
    return worst <= 0.15 ? pass(d) : fail(d);
}

// 2. 200 random circuits on n <= 3 against the dense unitary oracle.
Outcome simulator_oracle() {
    std::mt19937_64 rng(20240601);
    double worst = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 3;
        const Circuit c = oracle::random_circuit(n, 1 + static_cast<int>(rng() % 20), rng);
        Statevector s = zero_state(n);
        run_circuit(s, c);
        const oracle::Vec expected = oracle::circuit_unitary(c) * oracle::zero_vec(n);
        worst = std::max(worst, (oracle::to_vec(s) - expected).cwiseAbs().maxCoeff());
    }
    const std::string d = fmt("200 circuits, max amplitude error %.2e", worst);
    return worst <= 1e-10 ? pass(d) : fail(d);
}

// 3. Exact fidelity Gram on 50 random vectors (n=4, d=3, eta=0.1).
Outcome kernel_properties() {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal(0.0, 3.0);
    RowMatrix x(50, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x.data()[i] = normal(rng);
    }
    FeatureMapConfig fm;
    fm.n_qubits = 4;
    fm.depth = 3;
    fm.eta = 0.1;
    fm.interleave_seed = 11;
    const RowMatrix k = gram(x, KernelConfig::fidelity(fm)).values;
    const double asym = (k - k.transpose()).cwiseAbs().maxCoeff();
    const double diag = (k.diagonal().array() - 1.0).abs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(k), Eigen::EigenvaluesOnly);
    const double ratio = es.eigenvalues().minCoeff() / es.eigenvalues().maxCoeff();
    const std::string d = fmt("asymmetry %.1e, diagonal error %.1e, min/max eigenvalue %.2e", asym, diag, ratio);
    return asym <= 1e-12 && diag <= 1e-10 && ratio >= -1e-8 ? pass(d) : fail(d);
}

// 4. Shot-noise standard deviation over 1e4 seeds.
Outcome shot_noise() {
    double worst = 0;
    for (double p : {0.1, 0.5, 0.9}) {
        for (long shots : {1000L, 10000L}) {
            double s = 0, s2 = 0;
            constexpr int seeds = 10000;
            for (int seed = 0; seed < seeds; ++seed) {
                const double v = sample_kernel(p, shots, derive_seed(static_cast<std::uint64_t>(shots), {static_cast<std::uint64_t>(p * 10), static_cast<std::uint64_t>(seed)}));
                s += v;
                s2 += v * v;
            }
            const double mean = s / seeds;
            const double sd = std::sqrt(s2 / seeds - mean * mean);
            worst = std::max(worst, std::abs(sd / std::sqrt(p * (1 - p) / shots) - 1.0));
        }
    }
    const std::string d = fmt("6 settings, max relative deviation of std %.1f%%", 100 * worst);
    return worst <= 0.10 ? pass(d) : fail(d);
}

// 5. OC-SVM nu-property and KKT residual on 20 Gaussian blobs.
Outcome nu_property() {
    double max_outliers = 0, max_raw = 0, min_sv = 1, max_kkt = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(500 + seed);
        std::normal_distribution<double> normal;
        RowMatrix x(100, 2);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            x.data()[i] = normal(rng);
        }
        const RowMatrix k = gram(x, KernelConfig::rbf(0.5)).values;
        const OcSvmModel m = train_ocsvm(k, 0.1);
        // free SVs sit on the boundary only up to the solver's stopping tolerance
        const double resolution = SolverOptions{}.tolerance * m.upper_bound();
        int outliers = 0, raw = 0;
        for (Eigen::Index i = 0; i < 100; ++i) {
            const double f = decision(m, row_span(k, i));
            outliers += f < -resolution;
            raw += f < 0;
        }
        max_outliers = std::max(max_outliers, outliers / 100.0);
        max_raw = std::max(max_raw, raw / 100.0);
        min_sv = std::min(min_sv, static_cast<double>(m.support.size()) / 100.0);
        max_kkt = std::max(max_kkt, kkt_violation(m, k));
    }
    const std::string d = fmt("max outlier fraction %.2f (%.2f counting f<0 exactly), min SV fraction %.2f, max KKT %.1e",
                            max_outliers, max_raw, min_sv, max_kkt);
    return max_outliers <= 0.11 + 1e-12 && min_sv >= 0.09 - 1e-12 && max_kkt <= 1e-3 ? pass(d) : fail(d);
}

// 6. AP against brute force on every label placement up to size 8, plus the worked example.
Outcome metric_correctness() {
    long checked = 0, mismatches = 0;
    for (int n = 1; n <= 8; ++n) {
        std::vector<double> scores(n);
        std::iota(scores.rbegin(), scores.rend(), 1.0);
        for (int mask = 1; mask < (1 << n); ++mask) {
            std::vector<int> labels(n);
            for (int i = 0; i < n; ++i) {
                labels[i] = (mask >> i) & 1;
            }
            ++checked;
            mismatches += average_precision(scores, labels) != oracle::brute_force_ap(scores, labels);
        }
    }
    const std::vector<double> s{0.9, 0.8, 0.7};
    const std::vector<int> y{1, 0, 1};
    const double worked = average_precision(s, y);
    const std::string d = fmt("%ld label placements, %ld mismatches; worked example %.15g", checked, mismatches, worked);
    return mismatches == 0 && std::abs(worked - 5.0 / 6.0) < 1e-15 ? pass(d) : fail(d);
}

// 7. Qualitative reproduction of the AP-vs-N curves on the real dataset.
Outcome figure_reproduction() {
    std::filesystem::path dataset;
    if (const char *env = std::getenv("QFD_CREDITCARD")) {
        dataset = env;
    } else if (std::filesystem::exists(std::filesystem::path(QFD_TEST_DATA) / "creditcard.csv")) {
        dataset = std::filesystem::path(QFD_TEST_DATA) / "creditcard.csv";
    }
    if (dataset.empty() || !std::filesystem::exists(dataset)) {
        return {Status::Skip, "credit-card dataset not found (set QFD_CREDITCARD or add tests/data/creditcard.csv)"};
    }
    const bool extended = std::getenv("QFD_EXTENDED") != nullptr;
    RunConfig c;
    c.dataset = dataset;
    c.n_components = extended ? std::vector<int>{2, 5, 10, 15, 20} : std::vector<int>{2, 5, 10};
    c.models = {ModelKind::OcSvmRbf, ModelKind::OcSvmFidelity};
    c.output_dir = std::filesystem::path(std::getenv("QFD_ACCEPTANCE_DIR") ? std::getenv("QFD_ACCEPTANCE_DIR") : "acceptance_results");
    const std::vector<ResultRow> rows = run_benchmark(c);
    std::map<int, double> rbf, fid;
    for (const ResultRow &r : rows) {
        (r.model == "ocsvm-rbf" ? rbf : fid)[r.n_features] = r.ap;
    }
    const int top = c.n_components.back();
    const bool rising = rbf.at(top) > rbf.at(2);
    const double margin = fid.at(top) - rbf.at(top);
    std::string d = fmt("RBF AP %.3f -> %.3f (N=2 -> %d), fidelity-RBF margin at N=%d: %+.3f", rbf.at(2), rbf.at(top), top, top, margin);
    bool ok = rising && margin > 0;
    if (extended) {
        const bool plateau = rbf.at(15) >= 0.45 && rbf.at(15) <= 0.65 && rbf.at(20) >= 0.45 && rbf.at(20) <= 0.65;
        const bool margin_band = margin >= 0.05 && margin <= 0.25;
        ok = ok && plateau && margin_band;
        d += fmt("; RBF AP N=15 %.3f, N=20 %.3f", rbf.at(15), rbf.at(20));
    } else {
        d += " (N <= 10 chain; set QFD_EXTENDED for N = 15, 20)";
    }
    return ok ? pass(d) : fail(d);
}

// 8. Two benchmark runs with one config produce byte-identical CSVs.
Outcome determinism() {
    const auto dir = std::filesystem::temp_directory_path() / "qfd_acceptance_determinism";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    oracle::write_creditcard_csv(dir / "cc.csv", 300, 30, 17, 1.0);
    RunConfig c;
    c.dataset = dir / "cc.csv";
    c.n_nominal = 200;
    c.n_fraud = 20;
    c.n_components = {2, 4};
    c.models = {ModelKind::LogReg, ModelKind::SvcRbf, ModelKind::OcSvmRbf, ModelKind::OcSvmFidelity, ModelKind::OcSvmProjected};
    c.feature_map.depth = 2;
    c.output_dir = dir / "run1";
    (void)run_benchmark(c);
    c.output_dir = dir / "run2";
    c.use_cache = false;
    (void)run_benchmark(c);
    const std::string a = slurp(dir / "run1" / "results.csv");
    const std::string b = slurp(dir / "run2" / "results.csv");
    std::filesystem::remove_all(dir);
    const std::string d = fmt("%zu bytes, %s", a.size(), a == b ? "identical" : "different");
    return !a.empty() && a == b ? pass(d) : fail(d);
}

}  // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"resource-estimator figures", resource_figures},
        {"simulator oracle equivalence", simulator_oracle},
        {"fidelity kernel properties", kernel_properties},
        {"shot-noise statistics", shot_noise},
        {"OC-SVM nu-property", nu_property},
        {"metric correctness", metric_correctness},
        {"figure reproduction", figure_reproduction},
        {"benchmark determinism", determinism},
    };
    int failures = 0;
    int index = 0;
    for (const auto &[name, check] : criteria) {
        ++index;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = check();
        } catch (const std::exception &e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const char *tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
        std::printf("[%s] %d. %s: %s (%.2fs)\n", tag, index, name, o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.status == Status::Fail;
    }
    std::printf("%d criteria, %d failed\n", index, failures);
    return failures == 0 ? 0 : 1;
}
