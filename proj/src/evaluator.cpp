#include "fivec/evaluator.hpp"

#include "fivec/errors.hpp"
#include "fivec/hash.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <set>

namespace fivec {

namespace {

// One training + scoring pass; never throws, failures land in the row.
MetricsRow execute_run(const LoanDataset& train, const LoanDataset& test,
                       const std::vector<FeatureId>& features, const ModelSpec& spec,
                       const std::string& label, double classify_threshold) {
    MetricsRow row;
    row.algorithm = label;
    try {
        const EncodingMode mode =
            is_tree_kind(spec.kind) ? EncodingMode::Tree : EncodingMode::Gradient;
        const Encoder encoder = Encoder::fit(train, mode, features);
        const EncodedMatrix X_train = encoder.transform(train);
        const EncodedMatrix X_test = encoder.transform(test);
        const TrainedModel model = fit_model(spec, X_train);
        const auto proba = model.predict_proba(X_test);
        const auto predicted = model.classify(X_test, classify_threshold);
        const auto cm = confusion(X_test.labels, predicted);
        row.summary = summarize(cm);
        row.auc = roc_auc(X_test.labels, proba);
        row.wall_time_s = model.train_seconds;
    } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
    }
    return row;
}

struct RunTask {
    size_t model = 0;
    int set_index = -1; // -1 = baseline
};

const std::vector<FeatureId>& task_features(const ExperimentPlan& plan, const RunTask& task) {
    return task.set_index < 0
               ? plan.original_features
               : plan.generalized_sets[static_cast<size_t>(task.set_index)].features;
}

std::string task_label(const ExperimentPlan& plan, const RunTask& task) {
    const std::string name = model_kind_name(plan.model_specs[task.model].kind);
    return task.set_index < 0 ? name : name + "-G";
}

std::vector<MetricsRow> sweep(const LoanDataset& train, const LoanDataset& test,
                              const ExperimentPlan& plan, const std::vector<RunTask>& tasks) {
    std::vector<MetricsRow> results(tasks.size());
    auto run_one = [&](size_t i) {
        const auto& task = tasks[i];
        results[i] = execute_run(train, test, task_features(plan, task),
                                 plan.model_specs[task.model], task_label(plan, task),
                                 plan.classify_threshold);
    };
    const auto count = static_cast<long long>(tasks.size());
    if (plan.jobs > 1) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) num_threads(static_cast<int>(plan.jobs))
#endif
        for (long long i = 0; i < count; ++i) run_one(static_cast<size_t>(i));
    } else {
        for (long long i = 0; i < count; ++i) run_one(static_cast<size_t>(i));
    }
    return results;
}

} // namespace

double metric_value(const MetricsRow& row, const std::string& name) {
    if (row.failed) throw ArgumentError("metric requested from a failed run");
    if (name == "accuracy") return row.summary.accuracy;
    if (name == "precision") return row.summary.precision;
    if (name == "recall") return row.summary.recall;
    if (name == "f1") return row.summary.f1;
    if (name == "auc") return row.auc;
    throw ArgumentError("unknown selection metric: " + name);
}

void validate_plan(const ExperimentPlan& plan, const LoanDataset& ds) {
    if (plan.model_specs.empty()) throw ValidationError("experiment plan lists no models");
    if (plan.original_features.empty()) {
        throw ValidationError("experiment plan lists no original features");
    }
    if (!(plan.threshold >= 0.0)) throw ValidationError("allowable threshold must be >= 0");
    if (!(plan.classify_threshold >= 0.0 && plan.classify_threshold <= 1.0)) {
        throw ValidationError("classification threshold must lie in [0, 1]");
    }
    static const std::set<std::string> kMetrics{"accuracy", "precision", "recall", "f1", "auc"};
    if (!kMetrics.count(plan.selection_metric)) {
        throw ArgumentError("unknown selection metric: " + plan.selection_metric);
    }
    for (const auto& f : plan.original_features) {
        if (!ds.column_index(f)) {
            throw ValidationError("original feature absent from the dataset: " + f.name);
        }
    }
    for (size_t s = 0; s < plan.generalized_sets.size(); ++s) {
        for (const auto& f : plan.generalized_sets[s].features) {
            if (!ds.column_index(f)) {
                throw ValidationError("generalized set " + std::to_string(s) +
                                      " uses a feature absent from the dataset: " + f.name);
            }
        }
    }
    for (const auto& spec : plan.model_specs) spec.validate();
}

std::vector<MetricsRow> run_baseline(const LoanDataset& ds, const ExperimentPlan& plan) {
    validate_plan(plan, ds);
    const SplitResult split = stratified_split(ds, plan.split);
    std::vector<RunTask> tasks;
    for (size_t m = 0; m < plan.model_specs.size(); ++m) tasks.push_back({m, -1});
    return sweep(split.train, split.test, plan, tasks);
}

std::vector<std::vector<MetricsRow>> run_generalized(const LoanDataset& ds,
                                                     const ExperimentPlan& plan) {
    validate_plan(plan, ds);
    const SplitResult split = stratified_split(ds, plan.split);
    std::vector<RunTask> tasks;
    for (size_t m = 0; m < plan.model_specs.size(); ++m) {
        for (size_t s = 0; s < plan.generalized_sets.size(); ++s) {
            tasks.push_back({m, static_cast<int>(s)});
        }
    }
    const auto flat = sweep(split.train, split.test, plan, tasks);
    std::vector<std::vector<MetricsRow>> rows(plan.model_specs.size());
    for (size_t i = 0; i < tasks.size(); ++i) rows[tasks[i].model].push_back(flat[i]);
    return rows;
}

ComparisonReport compare(const std::vector<ModelKind>& kinds,
                         const std::vector<MetricsRow>& baseline,
                         const std::vector<std::vector<MetricsRow>>& generalized,
                         double threshold, const std::string& selection_metric) {
    if (kinds.size() != baseline.size() || kinds.size() != generalized.size()) {
        throw ArgumentError("compare inputs disagree on the model list");
    }
    static const std::set<std::string> kMetrics{"accuracy", "precision", "recall", "f1", "auc"};
    if (!kMetrics.count(selection_metric)) {
        throw ArgumentError("unknown selection metric: " + selection_metric);
    }

    ComparisonReport report;
    report.threshold = threshold;
    report.selection_metric = selection_metric;
    for (size_t m = 0; m < kinds.size(); ++m) {
        ModelComparison mc;
        mc.kind = kinds[m];
        mc.baseline = baseline[m];
        mc.generalized = generalized[m];

        double best_value = 0.0;
        for (size_t s = 0; s < mc.generalized.size(); ++s) {
            if (mc.generalized[s].failed) continue;
            const double value = metric_value(mc.generalized[s], selection_metric);
            if (mc.best_set < 0 || value > best_value) {
                mc.best_set = static_cast<int>(s);
                best_value = value;
            }
        }
        if (mc.best_set >= 0 && !mc.baseline.failed) {
            const auto& best = mc.generalized[static_cast<size_t>(mc.best_set)];
            mc.delta_accuracy = best.summary.accuracy - mc.baseline.summary.accuracy;
            mc.delta_precision = best.summary.precision - mc.baseline.summary.precision;
            mc.delta_recall = best.summary.recall - mc.baseline.summary.recall;
            mc.delta_f1 = best.summary.f1 - mc.baseline.summary.f1;
            mc.delta_auc = best.auc - mc.baseline.auc;
            mc.delta_time = best.wall_time_s - mc.baseline.wall_time_s;
            mc.accept = metric_value(mc.baseline, selection_metric) - best_value <= threshold;
        } else {
            report.warnings.push_back("no comparable run pair for " + model_kind_name(kinds[m]));
        }
        report.models.push_back(std::move(mc));
    }
    return report;
}

ComparisonReport run_experiment(const LoanDataset& ds, const ExperimentPlan& plan) {
    validate_plan(plan, ds);
    const SplitResult split = stratified_split(ds, plan.split);

    std::vector<RunTask> tasks;
    for (size_t m = 0; m < plan.model_specs.size(); ++m) {
        tasks.push_back({m, -1});
        for (size_t s = 0; s < plan.generalized_sets.size(); ++s) {
            tasks.push_back({m, static_cast<int>(s)});
        }
    }
    const auto flat = sweep(split.train, split.test, plan, tasks);

    std::vector<ModelKind> kinds;
    std::vector<MetricsRow> baseline(plan.model_specs.size());
    std::vector<std::vector<MetricsRow>> generalized(plan.model_specs.size());
    for (const auto& spec : plan.model_specs) kinds.push_back(spec.kind);
    for (size_t i = 0; i < tasks.size(); ++i) {
        if (tasks[i].set_index < 0) {
            baseline[tasks[i].model] = flat[i];
        } else {
            generalized[tasks[i].model].push_back(flat[i]);
        }
    }

    ComparisonReport report =
        compare(kinds, baseline, generalized, plan.threshold, plan.selection_metric);
    report.train_fingerprint = split.train.row_fingerprint();
    report.holdout_fingerprint = split.test.row_fingerprint();
    report.train_rows = split.train.row_count();
    report.holdout_rows = split.test.row_count();
    report.warnings.insert(report.warnings.begin(), split.warnings.begin(), split.warnings.end());
    return report;
}

std::string ComparisonReport::to_csv(bool include_timings) const {
    std::string out = metrics_csv_header() + ",Accept\n";
    auto strip_time = [&](MetricsRow row) {
        if (!include_timings) row.wall_time_s = 0.0;
        return row;
    };
    for (const auto& mc : models) {
        out += metrics_csv_row(strip_time(mc.baseline)) + ",\n";
        if (mc.best_set >= 0) {
            out += metrics_csv_row(strip_time(mc.generalized[static_cast<size_t>(mc.best_set)])) +
                   ",\n";
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s-delta,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f,%s",
                          model_kind_name(mc.kind).c_str(), mc.delta_accuracy, mc.delta_precision,
                          mc.delta_recall, mc.delta_f1, mc.delta_auc,
                          include_timings ? mc.delta_time : 0.0, mc.accept ? "true" : "false");
            out += std::string(buf) + "\n";
        } else {
            MetricsRow missing;
            missing.algorithm = model_kind_name(mc.kind) + "-G";
            missing.failed = true;
            out += metrics_csv_row(missing) + ",\n";
            out += model_kind_name(mc.kind) + "-delta,,,,,,,false\n";
        }
    }
    return out;
}

nlohmann::json ComparisonReport::to_json(bool include_timings) const {
    nlohmann::json models_json = nlohmann::json::array();
    for (const auto& mc : models) {
        auto strip_time = [&](const MetricsRow& row) {
            MetricsRow copy = row;
            if (!include_timings) copy.wall_time_s = 0.0;
            return copy.to_json();
        };
        nlohmann::json generalized_json = nlohmann::json::array();
        for (size_t s = 0; s < mc.generalized.size(); ++s) {
            generalized_json.push_back(
                nlohmann::json{{"set_index", s}, {"metrics", strip_time(mc.generalized[s])}});
        }
        models_json.push_back(nlohmann::json{
            {"kind", model_kind_name(mc.kind)},
            {"baseline", strip_time(mc.baseline)},
            {"generalized", std::move(generalized_json)},
            {"best_set", mc.best_set},
            {"deltas",
             nlohmann::json{{"accuracy", mc.delta_accuracy},
                            {"precision", mc.delta_precision},
                            {"recall", mc.delta_recall},
                            {"f1", mc.delta_f1},
                            {"auc", mc.delta_auc},
                            {"time", include_timings ? mc.delta_time : 0.0}}},
            {"accept", mc.accept}});
    }
    return nlohmann::json{{"selection_metric", selection_metric},
                          {"threshold", threshold},
                          {"train_rows", train_rows},
                          {"holdout_rows", holdout_rows},
                          {"train_fingerprint", to_hex(train_fingerprint)},
                          {"holdout_fingerprint", to_hex(holdout_fingerprint)},
                          {"models", std::move(models_json)},
                          {"warnings", warnings}};
}

} // namespace fivec
