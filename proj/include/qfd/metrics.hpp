#pragma once

#include <filesystem>
#include <span>
#include <vector>

namespace qfd {

/// Ranking metrics. Higher score means more anomalous; label 1 is the positive (anomaly) class.

struct PrPoint {
    double threshold;
    double precision;
    double recall;
};

/// One point per distinct score, thresholds descending. Equal scores enter
/// together. The implicit starting point has recall 0 and is not stored.
struct PrCurve {
    std::vector<PrPoint> points;
};

[[nodiscard]] PrCurve pr_curve(std::span<const double> scores, std::span<const int> labels);

/// Step-wise AP = sum_n (R_n - R_{n-1}) P_n with R_0 = 0. No interpolation.
[[nodiscard]] double average_precision(std::span<const double> scores, std::span<const int> labels);

/// Predicts anomaly where score >= threshold. F1 is 0 when precision + recall = 0.
[[nodiscard]] double f1_at_threshold(std::span<const double> scores, std::span<const int> labels, double threshold);
[[nodiscard]] double accuracy(std::span<const double> scores, std::span<const int> labels, double threshold);

/// Maximal F1 over all thresholds of the PR curve.
[[nodiscard]] double best_f1(std::span<const double> scores, std::span<const int> labels);

/// CSV with header "threshold,precision,recall".
void write_pr_curve_csv(const std::filesystem::path &path, const PrCurve &curve);

}  // namespace qfd
