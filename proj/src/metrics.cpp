#include "qfd/metrics.hpp"

#include "qfd/error.hpp"
#include "qfd/gram_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

namespace qfd {

namespace {

std::size_t check_inputs(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw DimensionError("got " + std::to_string(scores.size()) + " scores for " + std::to_string(labels.size()) + " labels");
    }
    std::size_t positives = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) {
            throw ValueError("labels must be 0 or 1");
        }
        if (std::isnan(scores[i])) {
            throw ValueError("score " + std::to_string(i) + " is NaN");
        }
        positives += static_cast<std::size_t>(labels[i]);
    }
    if (positives == 0) {
        throw ValueError("ranking metrics need at least one positive label");
    }
    return positives;
}

struct Confusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
};

Confusion confusion_at(std::span<const double> scores, std::span<const int> labels, double threshold) {
    Confusion c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        if (labels[i] == 1) {
            (predicted ? c.tp : c.fn) += 1;
        } else {
            (predicted ? c.fp : c.tn) += 1;
        }
    }
    return c;
}

double f1_of(std::size_t tp, std::size_t fp, std::size_t fn) {
    const double denom = 2.0 * static_cast<double>(tp) + static_cast<double>(fp) + static_cast<double>(fn);
    return tp == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

}  // namespace

PrCurve pr_curve(std::span<const double> scores, std::span<const int> labels) {
    const std::size_t positives = check_inputs(scores, labels);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    PrCurve curve;
    std::size_t tp = 0;
    std::size_t seen = 0;
    for (std::size_t k = 0; k < order.size();) {
        const double t = scores[order[k]];
        while (k < order.size() && scores[order[k]] == t) {
            tp += static_cast<std::size_t>(labels[order[k]]);
            ++seen;
            ++k;
        }
        curve.points.push_back({t, static_cast<double>(tp) / static_cast<double>(seen), static_cast<double>(tp) / static_cast<double>(positives)});
    }
    return curve;
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
    const PrCurve curve = pr_curve(scores, labels);
    double ap = 0.0;
    double prev_recall = 0.0;
    for (const PrPoint &p : curve.points) {
        ap += (p.recall - prev_recall) * p.precision;
        prev_recall = p.recall;
    }
    return ap;
}

double f1_at_threshold(std::span<const double> scores, std::span<const int> labels, double threshold) {
    check_inputs(scores, labels);
    const Confusion c = confusion_at(scores, labels, threshold);
    return f1_of(c.tp, c.fp, c.fn);
}

double accuracy(std::span<const double> scores, std::span<const int> labels, double threshold) {
    check_inputs(scores, labels);
    const Confusion c = confusion_at(scores, labels, threshold);
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(scores.size());
}

double best_f1(std::span<const double> scores, std::span<const int> labels) {
    const PrCurve curve = pr_curve(scores, labels);
    double best = 0.0;
    for (const PrPoint &p : curve.points) {
        if (p.precision + p.recall > 0.0) {
            best = std::max(best, 2.0 * p.precision * p.recall / (p.precision + p.recall));
        }
    }
    return best;
}

void write_pr_curve_csv(const std::filesystem::path &path, const PrCurve &curve) {
    std::ofstream out(path);
    if (!out) {
        throw SchemaError("cannot open " + path.string() + " for writing");
    }
    out << "threshold,precision,recall\n";
    for (const PrPoint &p : curve.points) {
        out << format_double(p.threshold) << ',' << format_double(p.precision) << ',' << format_double(p.recall) << '\n';
    }
}

}  // namespace qfd
