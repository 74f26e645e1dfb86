#pragma once

#include "fivec/concepts.hpp"
#include "fivec/loans.hpp"
#include "fivec/metrics.hpp"
#include "fivec/models.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace fivec {

// The comparison protocol: train every model once on the original feature
// slate and once per generalized set, score everything on one shared
// stratified holdout, then judge the best generalized run per model against
// the allowable-threshold rule.
struct ExperimentPlan {
    std::vector<FeatureId> original_features;
    std::vector<GeneralizedFeatureSet> generalized_sets;
    std::vector<ModelSpec> model_specs;
    SplitSpec split;
    double threshold = 0.05;                // allowable drop of the selection metric
    std::string selection_metric = "recall";
    double classify_threshold = 0.5;
    size_t jobs = 1;
};

// Throws ValidationError/ArgumentError naming the offending entry.
void validate_plan(const ExperimentPlan& plan, const LoanDataset& ds);

// Value of a named metric on a finished row; unknown name -> ArgumentError.
double metric_value(const MetricsRow& row, const std::string& name);

struct ModelComparison {
    ModelKind kind = ModelKind::RandomForest;
    MetricsRow baseline;
    std::vector<MetricsRow> generalized; // parallel to plan.generalized_sets
    int best_set = -1;                   // -1 = no successful generalized run
    // best generalized minus baseline; zeros when either side failed
    double delta_accuracy = 0.0;
    double delta_precision = 0.0;
    double delta_recall = 0.0;
    double delta_f1 = 0.0;
    double delta_auc = 0.0;
    double delta_time = 0.0;
    bool accept = false;
};

struct ComparisonReport {
    std::vector<ModelComparison> models;
    double threshold = 0.05;
    std::string selection_metric = "recall";
    uint64_t train_fingerprint = 0;
    uint64_t holdout_fingerprint = 0;
    size_t train_rows = 0;
    size_t holdout_rows = 0;
    std::vector<std::string> warnings;

    // CSV rows come in per-model triples (baseline, best generalized,
    // delta), with the accept verdict on the delta row.
    std::string to_csv(bool include_timings) const;
    nlohmann::json to_json(bool include_timings) const;
};

// Single-op entry points (each derives the identical split from the plan's
// seed; rows come back in plan order).
std::vector<MetricsRow> run_baseline(const LoanDataset& ds, const ExperimentPlan& plan);
std::vector<std::vector<MetricsRow>> run_generalized(const LoanDataset& ds,
                                                     const ExperimentPlan& plan);

ComparisonReport compare(const std::vector<ModelKind>& kinds,
                         const std::vector<MetricsRow>& baseline,
                         const std::vector<std::vector<MetricsRow>>& generalized,
                         double threshold, const std::string& selection_metric);

// Full protocol with one shared split and an optionally parallel sweep.
ComparisonReport run_experiment(const LoanDataset& ds, const ExperimentPlan& plan);

} // namespace fivec
