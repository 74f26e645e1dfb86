#include "fivec/errors.hpp"
#include "fivec/evaluator.hpp"
#include "fivec/rational.hpp"
#include "fivec/synthetic.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <string>
#include <vector>

using namespace fivec;

namespace {

LoanDataset synth_ds(size_t rows, uint64_t seed) {
    GeneratorConfig cfg;
    cfg.rows = rows;
    cfg.positive_ratio = 0.3;
    cfg.signal_features = {FeatureId{"creditscore"}, FeatureId{"cltvoriginal"}};
    cfg.signal_strength = 3.0;
    return generate_synthetic(cfg, seed);
}

GeneralizedFeatureSet make_set(std::vector<std::string> names) {
    GeneralizedFeatureSet set;
    for (auto& n : names) set.features.emplace_back(std::move(n));
    std::sort(set.features.begin(), set.features.end());
    set.support = make_rational(2, 33);
    set.coverage = covers_all_concepts(set.features, default_concept_map());
    return set;
}

GeneralizedFeatureSet set_a() {
    return make_set({"cltvoriginal", "creditscore", "currentloandelinquencystatus",
                     "interestratecurrent", "interestrateoriginal", "postalcode", "propertystate",
                     "upbactual"});
}

GeneralizedFeatureSet set_b() {
    return make_set({"cltv", "creditscoreoriginal", "debttoincomeratiooriginal",
                     "interestrateoriginal", "ltv", "postalcode", "propertystate", "upboriginal"});
}

ModelSpec small_spec(ModelKind kind, uint64_t seed) {
    ModelSpec spec;
    spec.kind = kind;
    spec.seed = seed;
    spec.forest.tree_count = 10;
    spec.forest.max_depth = 5;
    spec.boosting.rounds = 10;
    spec.nn.epochs = 10;
    spec.svm.epochs = 10;
    return spec;
}

ExperimentPlan base_plan(const LoanDataset& ds) {
    ExperimentPlan plan;
    for (const auto& col : ds.columns()) plan.original_features.push_back(col.first);
    plan.split.train_fraction = 0.7;
    plan.split.seed = 42;
    plan.model_specs.push_back(small_spec(ModelKind::RandomForest, 1));
    return plan;
}

MetricsRow ok_row(const std::string& label, double acc, double prec, double rec, double f1,
                  double auc, double time) {
    MetricsRow row;
    row.algorithm = label;
    row.summary.accuracy = acc;
    row.summary.precision = prec;
    row.summary.recall = rec;
    row.summary.f1 = f1;
    row.auc = auc;
    row.wall_time_s = time;
    return row;
}

MetricsRow failed_row(const std::string& label) {
    MetricsRow row;
    row.algorithm = label;
    row.failed = true;
    row.error = "boom";
    return row;
}

} // namespace

TEST_SUITE("evaluator") {

TEST_CASE("metric_value reads each named metric") {
    const MetricsRow row = ok_row("RF", 0.1, 0.2, 0.3, 0.4, 0.5, 9.0);
    CHECK(metric_value(row, "accuracy") == 0.1);
    CHECK(metric_value(row, "precision") == 0.2);
    CHECK(metric_value(row, "recall") == 0.3);
    CHECK(metric_value(row, "f1") == 0.4);
    CHECK(metric_value(row, "auc") == 0.5);
    CHECK_THROWS_AS(metric_value(row, "time"), ArgumentError);
    CHECK_THROWS_AS(metric_value(failed_row("RF"), "recall"), ArgumentError);
}

TEST_CASE("validate_plan rejects inconsistent plans") {
    const LoanDataset ds = synth_ds(60, 4);

    ExperimentPlan no_models = base_plan(ds);
    no_models.model_specs.clear();
    CHECK_THROWS_AS(validate_plan(no_models, ds), ValidationError);

    ExperimentPlan no_features = base_plan(ds);
    no_features.original_features.clear();
    CHECK_THROWS_AS(validate_plan(no_features, ds), ValidationError);

    ExperimentPlan bad_threshold = base_plan(ds);
    bad_threshold.threshold = -0.1;
    CHECK_THROWS_AS(validate_plan(bad_threshold, ds), ValidationError);

    ExperimentPlan bad_classify = base_plan(ds);
    bad_classify.classify_threshold = 1.5;
    CHECK_THROWS_AS(validate_plan(bad_classify, ds), ValidationError);

    ExperimentPlan bad_metric = base_plan(ds);
    bad_metric.selection_metric = "profit";
    CHECK_THROWS_AS(validate_plan(bad_metric, ds), ArgumentError);

    ExperimentPlan phantom = base_plan(ds);
    phantom.original_features.emplace_back("phantom");
    try {
        validate_plan(phantom, ds);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("phantom") != std::string::npos);
    }

    ExperimentPlan phantom_set = base_plan(ds);
    GeneralizedFeatureSet bad = set_a();
    bad.features[0] = FeatureId{"phantom"};
    phantom_set.generalized_sets.push_back(bad);
    try {
        validate_plan(phantom_set, ds);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("generalized set 0") != std::string::npos);
    }

    ExperimentPlan bad_spec = base_plan(ds);
    bad_spec.model_specs[0].forest.tree_count = 0;
    CHECK_THROWS_AS(validate_plan(bad_spec, ds), ArgumentError);
}

TEST_CASE("compare picks the best set with ties to the lowest index") {
    // dyadic metric values keep the threshold arithmetic exact
    const std::vector<ModelKind> kinds{ModelKind::RandomForest, ModelKind::GradientBoosting};
    const std::vector<MetricsRow> baseline{
        ok_row("RF", 0.875, 0.75, 0.875, 0.5, 0.75, 1.5),
        ok_row("GB", 0.75, 0.75, 0.875, 0.5, 0.75, 1.0),
    };
    const std::vector<std::vector<MetricsRow>> generalized{
        {failed_row("RF-G"), ok_row("RF-G", 0.625, 0.625, 0.75, 0.625, 0.625, 0.5),
         ok_row("RF-G", 0.5, 0.5, 0.75, 0.5, 0.5, 0.25)},
        {ok_row("GB-G", 0.5, 0.5, 0.5, 0.5, 0.5, 0.5),
         ok_row("GB-G", 0.625, 0.625, 0.5, 0.625, 0.625, 0.5)},
    };

    const ComparisonReport report = compare(kinds, baseline, generalized, 0.125, "recall");
    REQUIRE(report.models.size() == 2);

    // RF: the failed set is skipped; the two survivors tie on recall 0.75 and
    // the earlier one wins. 0.875 - 0.75 == threshold -> accept.
    const ModelComparison& rf = report.models[0];
    CHECK(rf.best_set == 1);
    CHECK(rf.accept);
    CHECK(rf.delta_recall == -0.125);
    CHECK(rf.delta_accuracy == -0.25);
    CHECK(rf.delta_time == -1.0);

    // GB: recall ties at 0.5 -> lowest index; drop 0.375 > 0.125 -> reject.
    const ModelComparison& gb = report.models[1];
    CHECK(gb.best_set == 0);
    CHECK_FALSE(gb.accept);
    CHECK(gb.delta_recall == -0.375);

    CHECK(report.warnings.empty());
    CHECK_THROWS_AS(compare(kinds, baseline, {generalized[0]}, 0.125, "recall"), ArgumentError);
    CHECK_THROWS_AS(compare(kinds, baseline, generalized, 0.125, "profit"), ArgumentError);
}

TEST_CASE("compare handles missing run pairs") {
    const std::vector<ModelKind> kinds{ModelKind::RandomForest, ModelKind::LinearSVM};
    const std::vector<MetricsRow> baseline{
        ok_row("RF", 0.875, 0.75, 0.875, 0.5, 0.75, 1.5),
        failed_row("SVM"),
    };
    const std::vector<std::vector<MetricsRow>> generalized{
        {failed_row("RF-G")},
        {ok_row("SVM-G", 0.875, 0.75, 0.875, 0.5, 0.75, 1.5)},
    };
    const ComparisonReport report = compare(kinds, baseline, generalized, 0.05, "recall");

    // RF: every generalized run failed
    CHECK(report.models[0].best_set == -1);
    CHECK_FALSE(report.models[0].accept);
    // SVM: generalized fine, baseline failed -> no pair either
    CHECK(report.models[1].best_set == 0);
    CHECK_FALSE(report.models[1].accept);
    CHECK(report.models[1].delta_recall == 0.0);

    REQUIRE(report.warnings.size() == 2);
    CHECK(report.warnings[0].find("RF") != std::string::npos);
    CHECK(report.warnings[1].find("SVM") != std::string::npos);
}

TEST_CASE("csv rows come in baseline/best/delta triples") {
    const std::vector<ModelKind> kinds{ModelKind::RandomForest};
    const std::vector<MetricsRow> baseline{ok_row("RF", 0.875, 0.75, 0.875, 0.5, 0.75, 1.5)};
    const std::vector<std::vector<MetricsRow>> generalized{
        {failed_row("RF-G"), ok_row("RF-G", 0.625, 0.625, 0.75, 0.625, 0.625, 0.5)}};
    const ComparisonReport report = compare(kinds, baseline, generalized, 0.125, "recall");

    CHECK(report.to_csv(true) == "Alg,Acc.,Prec.,Rec.,F.,AUC,Time,Accept\n"
                                 "RF,0.875,0.750,0.875,0.500,0.750,1.500,\n"
                                 "RF-G,0.625,0.625,0.750,0.625,0.625,0.500,\n"
                                 "RF-delta,-0.250,-0.125,-0.125,0.125,-0.125,-1.000,true\n");
    CHECK(report.to_csv(false) == "Alg,Acc.,Prec.,Rec.,F.,AUC,Time,Accept\n"
                                  "RF,0.875,0.750,0.875,0.500,0.750,0.000,\n"
                                  "RF-G,0.625,0.625,0.750,0.625,0.625,0.000,\n"
                                  "RF-delta,-0.250,-0.125,-0.125,0.125,-0.125,0.000,true\n");

    const std::vector<std::vector<MetricsRow>> dead{{failed_row("RF-G")}};
    const ComparisonReport missing = compare(kinds, baseline, dead, 0.125, "recall");
    CHECK(missing.to_csv(true) == "Alg,Acc.,Prec.,Rec.,F.,AUC,Time,Accept\n"
                                  "RF,0.875,0.750,0.875,0.500,0.750,1.500,\n"
                                  "RF-G,failed,failed,failed,failed,failed,failed,\n"
                                  "RF-delta,,,,,,,false\n");
}

TEST_CASE("run_experiment evaluates every model against every set") {
    const LoanDataset ds = synth_ds(300, 11);
    ExperimentPlan plan = base_plan(ds);
    plan.model_specs = {small_spec(ModelKind::RandomForest, 1),
                        small_spec(ModelKind::GradientBoosting, 2),
                        small_spec(ModelKind::LinearSVM, 3)};
    plan.generalized_sets = {set_a(), set_b()};

    const ComparisonReport report = run_experiment(ds, plan);
    REQUIRE(report.models.size() == 3);
    CHECK(report.train_rows + report.holdout_rows == 300);
    CHECK(report.warnings.empty());

    const SplitResult split = stratified_split(ds, plan.split);
    CHECK(report.train_fingerprint == split.train.row_fingerprint());
    CHECK(report.holdout_fingerprint == split.test.row_fingerprint());
    CHECK(report.train_rows == split.train.row_count());

    const std::vector<std::string> names{"RF", "GB", "SVM"};
    for (size_t m = 0; m < report.models.size(); ++m) {
        const ModelComparison& mc = report.models[m];
        CHECK(mc.baseline.algorithm == names[m]);
        CHECK_FALSE(mc.baseline.failed);
        REQUIRE(mc.generalized.size() == 2);
        for (const auto& row : mc.generalized) {
            CHECK(row.algorithm == names[m] + "-G");
            CHECK_FALSE(row.failed);
        }
        REQUIRE(mc.best_set >= 0);
        const MetricsRow& best = mc.generalized[static_cast<size_t>(mc.best_set)];
        CHECK(mc.delta_recall == best.summary.recall - mc.baseline.summary.recall);
        CHECK(mc.delta_auc == best.auc - mc.baseline.auc);
        const bool expect_accept = metric_value(mc.baseline, plan.selection_metric) -
                                       metric_value(best, plan.selection_metric) <=
                                   plan.threshold;
        CHECK(mc.accept == expect_accept);
    }
}

TEST_CASE("the sweep is deterministic and independent of the worker count") {
    const LoanDataset ds = synth_ds(200, 12);
    ExperimentPlan plan = base_plan(ds);
    plan.model_specs = {small_spec(ModelKind::RandomForest, 1),
                        small_spec(ModelKind::GradientBoosting, 2)};
    plan.generalized_sets = {set_a(), set_b()};

    ExperimentPlan wide = plan;
    wide.jobs = 4;
    const std::string serial = run_experiment(ds, plan).to_json(false).dump();
    const std::string parallel = run_experiment(ds, wide).to_json(false).dump();
    CHECK(serial == parallel);

    // the single-op entry points reproduce the full protocol's rows
    const auto baseline = run_baseline(ds, plan);
    const auto generalized = run_generalized(ds, plan);
    const ComparisonReport full = run_experiment(ds, plan);
    REQUIRE(baseline.size() == 2);
    REQUIRE(generalized.size() == 2);
    for (size_t m = 0; m < 2; ++m) {
        CHECK(baseline[m].summary.recall == full.models[m].baseline.summary.recall);
        CHECK(baseline[m].auc == full.models[m].baseline.auc);
        REQUIRE(generalized[m].size() == 2);
        for (size_t s = 0; s < 2; ++s) {
            CHECK(generalized[m][s].summary.recall ==
                  full.models[m].generalized[s].summary.recall);
            CHECK(generalized[m][s].auc == full.models[m].generalized[s].auc);
        }
    }
}

TEST_CASE("scoring failures are captured per run, not thrown") {
    // 40 rows at ratio 0.05 leave exactly 2 positives; a 0.9 split pulls both
    // into training, so the holdout is single-class and AUC is undefined.
    GeneratorConfig cfg;
    cfg.rows = 40;
    cfg.positive_ratio = 0.05;
    cfg.signal_features = {FeatureId{"creditscore"}};
    const LoanDataset ds = generate_synthetic(cfg, 5);

    ExperimentPlan plan = base_plan(ds);
    plan.split.train_fraction = 0.9;
    const ComparisonReport report = run_experiment(ds, plan);

    REQUIRE(report.models.size() == 1);
    CHECK(report.models[0].baseline.failed);
    CHECK(report.models[0].baseline.error.find("single class") != std::string::npos);
    CHECK(report.models[0].best_set == -1);
    CHECK_FALSE(report.models[0].accept);
    CHECK_FALSE(report.warnings.empty());

    const std::string csv = report.to_csv(true);
    CHECK(csv.find("RF,failed") != std::string::npos);
    CHECK(csv.find("RF-delta,,,,,,,false") != std::string::npos);
}

TEST_CASE("reports serialize the verdict and the split identity") {
    const LoanDataset ds = synth_ds(150, 3);
    ExperimentPlan plan = base_plan(ds);
    plan.generalized_sets = {set_a()};
    const ComparisonReport report = run_experiment(ds, plan);

    const nlohmann::json doc = report.to_json(false);
    CHECK(doc.at("selection_metric") == "recall");
    CHECK(doc.at("threshold") == 0.05);
    CHECK(doc.at("train_rows").get<size_t>() + doc.at("holdout_rows").get<size_t>() == 150);
    CHECK(doc.at("train_fingerprint").get<std::string>().size() == 16);
    REQUIRE(doc.at("models").size() == 1);
    const auto& mj = doc.at("models")[0];
    CHECK(mj.at("kind") == "RF");
    CHECK(mj.at("baseline").at("wall_time_s") == 0.0); // timings omitted
    CHECK(mj.at("generalized")[0].at("set_index") == 0);
    CHECK(mj.at("best_set") == 0);
    CHECK(mj.at("deltas").contains("recall"));
    CHECK((mj.at("accept") == true || mj.at("accept") == false));
}

} // TEST_SUITE
