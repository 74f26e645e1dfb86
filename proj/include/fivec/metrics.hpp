#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace fivec {

struct ConfusionMatrix {
    size_t tp = 0;
    size_t fp = 0;
    size_t tn = 0;
    size_t fn = 0;

    size_t total() const { return tp + fp + tn + fn; }
};

ConfusionMatrix confusion(const std::vector<uint8_t>& y_true, const std::vector<uint8_t>& y_pred);

// Zero-denominator ratios are reported as 0 with the matching flag cleared,
// so imbalanced runs that predict no positives stay comparable instead of
// propagating NaNs.
struct MetricsSummary {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool accuracy_defined = true;
    bool precision_defined = true;
    bool recall_defined = true;
    bool f1_defined = true;
};

MetricsSummary summarize(const ConfusionMatrix& cm);

// Rank statistic: probability a random positive outscores a random negative,
// ties counted half. Equals trapezoidal ROC integration.
double roc_auc(const std::vector<uint8_t>& y_true, const std::vector<double>& scores);

// One report line in the comparison table's column order:
// Alg, Acc., Prec., Rec., F., AUC, Time.
struct MetricsRow {
    std::string algorithm;
    MetricsSummary summary;
    double auc = 0.0;
    double wall_time_s = 0.0;
    bool failed = false;
    std::string error;

    nlohmann::json to_json() const;
    static MetricsRow from_json(const nlohmann::json& doc);
};

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRow& row);

} // namespace fivec
