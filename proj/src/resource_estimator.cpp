#include "qfd/resource_estimator.hpp"

#include "qfd/error.hpp"
#include "qfd/gram_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace qfd {

const std::vector<HardwareProfile> &builtin_profiles() {
    static const std::vector<HardwareProfile> profiles{
        {"sc-optimistic", 1e6, "superconducting, ~1 us circuits: MHz repetition"},
        {"sc-pessimistic", 1e3, "superconducting with passive reset: 1 kHz repetition"},
        {"trapped-ion", 1e4, "~100 us per shot including readout: 10 kHz"},
        {"photonic", 1e10, "~100 ps photon lifetime bound: 10 GHz"},
    };
    return profiles;
}

const HardwareProfile &find_profile(const std::string &name) {
    for (const HardwareProfile &p : builtin_profiles()) {
        if (p.name == name) {
            return p;
        }
    }
    std::string names;
    for (const HardwareProfile &p : builtin_profiles()) {
        names += (names.empty() ? "" : ", ") + p.name;
    }
    throw ValueError("unknown hardware profile '" + name + "'; available: " + names);
}

std::string to_string(EvalConvention c) {
    switch (c) {
        case EvalConvention::Full: return "full";
        case EvalConvention::Triangle: return "triangle";
        case EvalConvention::Linear: return "linear";
    }
    return "?";
}

EvalConvention eval_convention_from_string(const std::string &name) {
    if (name == "full") {
        return EvalConvention::Full;
    }
    if (name == "triangle") {
        return EvalConvention::Triangle;
    }
    if (name == "linear") {
        return EvalConvention::Linear;
    }
    throw ValueError("unknown evaluation convention '" + name + "' (expected full, triangle or linear)");
}

std::uint64_t training_evals(const WorkloadSpec &spec) {
    const std::uint64_t n = spec.n_samples;
    switch (spec.convention) {
        case EvalConvention::Full: return n * n;
        case EvalConvention::Triangle: return n * (n - (n > 0 ? 1 : 0)) / 2;
        case EvalConvention::Linear: return n;
    }
    return 0;
}

std::uint64_t inference_evals(std::uint64_t n_queries, std::uint64_t n_samples) {
    return n_queries * n_samples;
}

double wall_time(std::uint64_t evals, std::uint64_t n_shots, const HardwareProfile &profile) {
    if (!(profile.rate > 0.0)) {
        throw ValueError("hardware rate must be positive");
    }
    return static_cast<double>(evals) * static_cast<double>(n_shots) / profile.rate;
}

std::string format_duration(double seconds) {
    struct Unit {
        const char *suffix;
        double scale;
    };
    static constexpr Unit units[] = {{"years", kSecondsPerYear}, {"weeks", 7.0 * 86400.0}, {"h", 3600.0}, {"min", 60.0}};
    char buf[64];
    for (const Unit &u : units) {
        if (seconds >= u.scale) {
            std::snprintf(buf, sizeof buf, "%.3g %s", seconds / u.scale, u.suffix);
            return buf;
        }
    }
    if (seconds > 0.0 && seconds < 1.0) {
        std::snprintf(buf, sizeof buf, "%.3g ms", seconds * 1e3);
        return buf;
    }
    std::snprintf(buf, sizeof buf, "%.3g s", seconds);
    return buf;
}

EstimateRow estimate(const WorkloadSpec &spec, const HardwareProfile &profile) {
    if (spec.n_shots < 1) {
        throw ValueError("n_shots must be >= 1");
    }
    if (spec.n_samples < 1) {
        throw ValueError("n_samples must be >= 1");
    }
    EstimateRow row{profile.name, profile.rate, spec.n_samples, spec.n_queries, spec.n_shots, training_evals(spec), inference_evals(spec.n_queries, spec.n_samples), 0.0, 0.0};
    row.train_seconds = wall_time(row.train_evals, spec.n_shots, profile);
    row.infer_seconds = wall_time(row.infer_evals, spec.n_shots, profile);
    return row;
}

std::vector<EstimateRow> sweep(std::span<const std::uint64_t> sample_counts, std::span<const std::uint64_t> shot_budgets, std::span<const HardwareProfile> profiles,
                               std::uint64_t n_queries, EvalConvention convention) {
    std::vector<EstimateRow> rows;
    for (const HardwareProfile &p : profiles) {
        for (std::uint64_t n : sample_counts) {
            for (std::uint64_t shots : shot_budgets) {
                rows.push_back(estimate(WorkloadSpec{n, n_queries, shots, convention}, p));
            }
        }
    }
    return rows;
}

void write_sweep_csv(const std::filesystem::path &path, std::span<const EstimateRow> rows) {
    std::ofstream out(path);
    if (!out) {
        throw SchemaError("cannot open " + path.string() + " for writing");
    }
    out << "profile,rate,n_samples,n_queries,n_shots,train_evals,infer_evals,train_seconds,infer_seconds\n";
    for (const EstimateRow &r : rows) {
        out << r.profile << ',' << format_double(r.rate) << ',' << r.n_samples << ',' << r.n_queries << ',' << r.n_shots << ',' << r.train_evals << ',' << r.infer_evals << ','
            << format_double(r.train_seconds) << ',' << format_double(r.infer_seconds) << '\n';
    }
}

}  // namespace qfd
