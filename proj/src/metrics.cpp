#include "fivec/metrics.hpp"

#include "fivec/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace fivec {

ConfusionMatrix confusion(const std::vector<uint8_t>& y_true, const std::vector<uint8_t>& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw ArgumentError("confusion inputs differ in length: " + std::to_string(y_true.size()) +
                            " vs " + std::to_string(y_pred.size()));
    }
    ConfusionMatrix cm;
    for (size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] > 1 || y_pred[i] > 1) {
            throw ArgumentError("confusion inputs must be binary, row " + std::to_string(i));
        }
        if (y_true[i]) {
            ++(y_pred[i] ? cm.tp : cm.fn);
        } else {
            ++(y_pred[i] ? cm.fp : cm.tn);
        }
    }
    return cm;
}

MetricsSummary summarize(const ConfusionMatrix& cm) {
    MetricsSummary s;
    const auto ratio = [](size_t num, size_t den, double& slot, bool& defined) {
        if (den == 0) {
            slot = 0.0;
            defined = false;
        } else {
            slot = static_cast<double>(num) / static_cast<double>(den);
            defined = true;
        }
    };
    ratio(cm.tp + cm.tn, cm.total(), s.accuracy, s.accuracy_defined);
    ratio(cm.tp, cm.tp + cm.fp, s.precision, s.precision_defined);
    ratio(cm.tp, cm.tp + cm.fn, s.recall, s.recall_defined);
    if (!s.precision_defined || !s.recall_defined || s.precision + s.recall == 0.0) {
        s.f1 = 0.0;
        s.f1_defined = false;
    } else {
        s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
        s.f1_defined = true;
    }
    return s;
}

double roc_auc(const std::vector<uint8_t>& y_true, const std::vector<double>& scores) {
    if (y_true.size() != scores.size()) {
        throw ArgumentError("roc_auc inputs differ in length");
    }
    size_t positives = 0;
    for (const uint8_t y : y_true) {
        if (y > 1) throw ArgumentError("roc_auc labels must be binary");
        positives += y;
    }
    const size_t negatives = y_true.size() - positives;
    if (positives == 0 || negatives == 0) {
        throw UnsupportedError("roc_auc undefined: labels contain a single class");
    }

    // Average ranks over score ties, then the Mann-Whitney identity.
    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    double positive_rank_sum = 0.0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j); // 1-based ranks i+1..j
        for (size_t k = i; k < j; ++k) {
            if (y_true[order[k]]) positive_rank_sum += avg_rank;
        }
        i = j;
    }
    const double np = static_cast<double>(positives);
    const double nn = static_cast<double>(negatives);
    return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

std::string metrics_csv_header() {
    return "Alg,Acc.,Prec.,Rec.,F.,AUC,Time";
}

std::string metrics_csv_row(const MetricsRow& row) {
    if (row.failed) {
        return row.algorithm + ",failed,failed,failed,failed,failed,failed";
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f", row.algorithm.c_str(),
                  row.summary.accuracy, row.summary.precision, row.summary.recall, row.summary.f1,
                  row.auc, row.wall_time_s);
    return buf;
}

nlohmann::json MetricsRow::to_json() const {
    nlohmann::json doc{{"algorithm", algorithm}, {"failed", failed}};
    if (failed) {
        doc["error"] = error;
        return doc;
    }
    doc["accuracy"] = summary.accuracy;
    doc["precision"] = summary.precision;
    doc["recall"] = summary.recall;
    doc["f1"] = summary.f1;
    doc["auc"] = auc;
    doc["wall_time_s"] = wall_time_s;
    nlohmann::json undefined = nlohmann::json::array();
    if (!summary.accuracy_defined) undefined.push_back("accuracy");
    if (!summary.precision_defined) undefined.push_back("precision");
    if (!summary.recall_defined) undefined.push_back("recall");
    if (!summary.f1_defined) undefined.push_back("f1");
    doc["undefined_metrics"] = std::move(undefined);
    return doc;
}

MetricsRow MetricsRow::from_json(const nlohmann::json& doc) {
    MetricsRow row;
    try {
        row.algorithm = doc.at("algorithm").get<std::string>();
        row.failed = doc.at("failed").get<bool>();
        if (row.failed) {
            row.error = doc.value("error", "");
            return row;
        }
        row.summary.accuracy = doc.at("accuracy").get<double>();
        row.summary.precision = doc.at("precision").get<double>();
        row.summary.recall = doc.at("recall").get<double>();
        row.summary.f1 = doc.at("f1").get<double>();
        row.auc = doc.at("auc").get<double>();
        row.wall_time_s = doc.at("wall_time_s").get<double>();
        for (const auto& name : doc.at("undefined_metrics")) {
            const auto metric = name.get<std::string>();
            if (metric == "accuracy") row.summary.accuracy_defined = false;
            if (metric == "precision") row.summary.precision_defined = false;
            if (metric == "recall") row.summary.recall_defined = false;
            if (metric == "f1") row.summary.f1_defined = false;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("metrics row: ") + e.what());
    }
    return row;
}

} // namespace fivec
