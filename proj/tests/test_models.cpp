#include "fivec/encoding.hpp"
#include "fivec/errors.hpp"
#include "fivec/models.hpp"
#include "fivec/rng.hpp"
#include "fivec/synthetic.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <vector>

using namespace fivec;

namespace {

EncodedMatrix labeled(size_t cols, const std::vector<double>& values,
                      const std::vector<uint8_t>& labels) {
    EncodedMatrix m;
    m.cols = cols;
    m.rows = values.size() / cols;
    m.values = values;
    m.labels = labels;
    m.col_is_categorical.assign(cols, 0);
    for (size_t c = 0; c < cols; ++c) {
        m.col_names.push_back("c" + std::to_string(c));
        m.col_feature.push_back(c);
        m.source_features.emplace_back("c" + std::to_string(c));
    }
    return m;
}

// Two well-separated Gaussian blobs in 2-d.
EncodedMatrix blob_matrix(size_t per_class, double gap, uint64_t seed) {
    Rng rng(seed);
    std::vector<double> values;
    std::vector<uint8_t> labels;
    for (size_t i = 0; i < 2 * per_class; ++i) {
        const uint8_t y = i < per_class ? 0 : 1;
        const double sign = y ? 1.0 : -1.0;
        values.push_back(sign * gap + 0.3 * rng.next_normal());
        values.push_back(-sign * gap + 0.3 * rng.next_normal());
        labels.push_back(y);
    }
    return labeled(2, values, labels);
}

EncodedMatrix synth_matrix(size_t rows, EncodingMode mode, uint64_t seed) {
    GeneratorConfig cfg;
    cfg.rows = rows;
    cfg.positive_ratio = 0.3;
    cfg.signal_features = {FeatureId{"creditscore"}, FeatureId{"cltvoriginal"}};
    cfg.signal_strength = 3.0;
    const LoanDataset ds = generate_synthetic(cfg, seed);
    return Encoder::fit(ds, mode).transform(ds);
}

} // namespace

TEST_SUITE("models") {

TEST_CASE("kind names round-trip and accept the long spellings") {
    for (const ModelKind kind : kAllModelKinds) {
        CHECK(model_kind_from_name(model_kind_name(kind)) == kind);
    }
    CHECK(model_kind_from_name("ann") == ModelKind::NeuralNet);
    CHECK(model_kind_from_name("random_forest") == ModelKind::RandomForest);
    CHECK(model_kind_from_name("RandomForest") == ModelKind::RandomForest);
    CHECK(model_kind_from_name("extratrees") == ModelKind::ExtraTrees);
    CHECK(model_kind_from_name("gradient_boosting") == ModelKind::GradientBoosting);
    CHECK_THROWS_AS(model_kind_from_name("xgboost"), ArgumentError);

    CHECK_FALSE(is_tree_kind(ModelKind::NeuralNet));
    CHECK_FALSE(is_tree_kind(ModelKind::LinearSVM));
    CHECK(is_tree_kind(ModelKind::RandomForest));
    CHECK(is_tree_kind(ModelKind::ExtraTrees));
    CHECK(is_tree_kind(ModelKind::GradientBoosting));
}

TEST_CASE("spec validation rejects bad hyperparameters") {
    ModelSpec nn;
    nn.kind = ModelKind::NeuralNet;
    nn.nn.hidden_units = 0;
    CHECK_THROWS_AS(nn.validate(), ArgumentError);
    nn.nn.hidden_units = 4;
    nn.nn.learning_rate = 1.5;
    CHECK_THROWS_AS(nn.validate(), ArgumentError);

    ModelSpec svm;
    svm.kind = ModelKind::LinearSVM;
    svm.svm.lambda = 0.0;
    CHECK_THROWS_AS(svm.validate(), ArgumentError);

    ModelSpec rf;
    rf.kind = ModelKind::RandomForest;
    rf.forest.tree_count = 0;
    CHECK_THROWS_AS(rf.validate(), ArgumentError);

    ModelSpec gb;
    gb.kind = ModelKind::GradientBoosting;
    gb.boosting.learning_rate = 0.0;
    CHECK_THROWS_AS(gb.validate(), ArgumentError);
}

TEST_CASE("specs round-trip through JSON") {
    ModelSpec spec;
    spec.kind = ModelKind::GradientBoosting;
    spec.seed = 99;
    spec.boosting.rounds = 13;
    spec.boosting.max_depth = 2;
    spec.boosting.learning_rate = 0.05;
    const ModelSpec back = ModelSpec::from_json(spec.to_json());
    CHECK(back.kind == ModelKind::GradientBoosting);
    CHECK(back.seed == 99);
    CHECK(back.boosting.rounds == 13);
    CHECK(back.boosting.max_depth == 2);
    CHECK(back.boosting.learning_rate == 0.05);

    ModelSpec ann;
    ann.kind = ModelKind::NeuralNet;
    ann.nn.hidden_units = 8;
    ann.nn.positive_weight = 2.5;
    const ModelSpec ann_back = ModelSpec::from_json(ann.to_json());
    CHECK(ann_back.nn.hidden_units == 8);
    CHECK(ann_back.nn.positive_weight == 2.5);

    // partial hyperparameters keep defaults
    const ModelSpec sparse =
        ModelSpec::from_json(nlohmann::json{{"kind", "RF"}, {"hyperparameters", {{"tree_count", 7}}}});
    CHECK(sparse.forest.tree_count == 7);
    CHECK(sparse.forest.max_depth == 12);
    CHECK(sparse.seed == 0);

    CHECK_THROWS_AS(ModelSpec::from_json(nlohmann::json::object()), ParseError);
    CHECK_THROWS_AS(ModelSpec::from_json(nlohmann::json{{"kind", "mystery"}}), ArgumentError);
    CHECK_THROWS_AS(
        ModelSpec::from_json(nlohmann::json{{"kind", "GB"},
                                            {"hyperparameters", {{"learning_rate", 2.0}}}}),
        ArgumentError);
}

TEST_CASE("network gradients match central finite differences") {
    Rng rng(424242);
    const size_t n = 8, d = 3;
    std::vector<double> values(n * d);
    std::vector<uint8_t> labels(n);
    for (size_t i = 0; i < n; ++i) {
        labels[i] = static_cast<uint8_t>(i % 2);
        for (size_t j = 0; j < d; ++j) values[i * d + j] = 2.0 * rng.next_double() - 1.0;
    }
    const EncodedMatrix X = labeled(d, values, labels);

    NeuralNet net(d, 4);
    net.init_weights(7);
    for (auto& p : net.params()) p += 0.05 * (2.0 * rng.next_double() - 1.0);

    std::vector<uint32_t> rows(n);
    for (size_t i = 0; i < n; ++i) rows[i] = static_cast<uint32_t>(i);
    std::vector<double> grad;
    net.loss_and_gradient(X, rows, /*positive_weight=*/2.0, grad);

    const double h = 1e-6;
    std::vector<double> scratch;
    for (size_t p = 0; p < net.params().size(); ++p) {
        const double saved = net.params()[p];
        net.params()[p] = saved + h;
        const double up = net.loss_and_gradient(X, rows, 2.0, scratch);
        net.params()[p] = saved - h;
        const double down = net.loss_and_gradient(X, rows, 2.0, scratch);
        net.params()[p] = saved;
        const double fd = (up - down) / (2.0 * h);
        REQUIRE(std::abs(fd - grad[p]) <= 1e-6 + 1e-4 * std::max(std::abs(fd), std::abs(grad[p])));
    }
}

TEST_CASE("sgd training lowers the loss and separates the blobs") {
    const EncodedMatrix X = blob_matrix(30, 1.5, 1001);
    std::vector<uint32_t> rows(X.rows);
    for (size_t i = 0; i < X.rows; ++i) rows[i] = static_cast<uint32_t>(i);

    NeuralNetConfig cfg;
    cfg.hidden_units = 8;
    cfg.epochs = 300;
    cfg.batch_size = 8;
    cfg.learning_rate = 0.1;

    NeuralNet fresh(X.cols, cfg.hidden_units);
    fresh.init_weights(mix_seed(5, 0)); // same init path as the trainer
    std::vector<double> grad;
    const double before = fresh.loss_and_gradient(X, rows, 1.0, grad);

    const NeuralNet net = fit_neural_net(X, cfg, 5);
    const double after = net.loss_and_gradient(X, rows, 1.0, grad);
    CHECK(after < before);

    size_t correct = 0;
    for (size_t r = 0; r < X.rows; ++r) {
        const uint8_t pred = net.predict_row(X.row(r)) >= 0.5 ? 1 : 0;
        correct += pred == X.labels[r];
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(X.rows) >= 0.95);
}

TEST_CASE("separable data drives the hinge loss to exactly zero") {
    const EncodedMatrix X = blob_matrix(12, 2.0, 31);
    LinearSvmConfig cfg;
    cfg.lambda = 0.01;
    cfg.epochs = 2000; // early stop fires long before this
    const LinearSvm svm = fit_linear_svm(X, cfg, 9);

    CHECK(svm.hinge_loss(X) == 0.0);
    for (size_t r = 0; r < X.rows; ++r) {
        const double s = X.labels[r] ? 1.0 : -1.0;
        CHECK(s * svm.margin(X.row(r)) >= 1.0);
        const double p = svm.predict_row(X.row(r));
        CHECK((X.labels[r] ? p > 0.5 : p < 0.5));
    }
}

TEST_CASE("forest probability is the mean leaf fraction across trees") {
    const EncodedMatrix X = synth_matrix(200, EncodingMode::Tree, 77);
    ForestConfig cfg;
    cfg.tree_count = 7;
    cfg.max_depth = 6;
    const Forest forest = fit_forest(X, cfg, 3);
    REQUIRE(forest.trees.size() == 7);

    for (size_t r = 0; r < 10; ++r) {
        double sum = 0.0;
        for (const auto& tree : forest.trees) sum += tree.predict(X.row(r));
        CHECK(forest.predict_row(X.row(r)) == sum / 7.0);
    }

    const Forest back = Forest::from_json(forest.to_json());
    for (size_t r = 0; r < 10; ++r) {
        CHECK(back.predict_row(X.row(r)) == forest.predict_row(X.row(r)));
    }
    CHECK(back.importance == forest.importance);
    CHECK_THROWS_AS(Forest::from_json(nlohmann::json{{"trees", nlohmann::json::array()},
                                                     {"importance", std::vector<double>{}}}),
                    ParseError);
    Forest untrained;
    const double zero = 0.0;
    CHECK_THROWS_AS(untrained.predict_row(&zero), ContractError);
}

TEST_CASE("one unbagged full-mtry tree reproduces grow_tree") {
    const EncodedMatrix X = synth_matrix(150, EncodingMode::Tree, 50);
    ForestConfig cfg;
    cfg.tree_count = 1;
    cfg.bootstrap = false;
    cfg.random_threshold = false;
    cfg.mtry = X.cols;
    cfg.max_depth = 12;
    const Forest forest = fit_forest(X, cfg, 11);

    std::vector<double> y(X.rows);
    for (size_t r = 0; r < X.rows; ++r) y[r] = static_cast<double>(X.labels[r]);
    std::vector<uint32_t> rows(X.rows);
    for (size_t i = 0; i < X.rows; ++i) rows[i] = static_cast<uint32_t>(i);
    TreeGrowth growth;
    growth.max_depth = 12;
    growth.mtry = X.cols;
    std::vector<double> slab(X.cols, 0.0);
    Rng rng(mix_seed(11, 0)); // tree 0 stream
    const Tree manual = grow_tree(X, y, rows, growth, rng, &slab);

    CHECK(forest.trees[0].to_json() == manual.to_json());
    CHECK(forest.importance == slab);
}

TEST_CASE("forests ignore the worker count and respect the seed") {
    const EncodedMatrix X = synth_matrix(200, EncodingMode::Tree, 21);
    for (const bool random_threshold : {false, true}) {
        ForestConfig serial;
        serial.tree_count = 12;
        serial.max_depth = 6;
        serial.random_threshold = random_threshold;
        serial.bootstrap = !random_threshold;
        ForestConfig parallel = serial;
        parallel.jobs = 4;

        const Forest a = fit_forest(X, serial, 1234);
        const Forest b = fit_forest(X, parallel, 1234);
        CHECK(a.to_json() == b.to_json());

        const Forest c = fit_forest(X, serial, 1235);
        CHECK(a.to_json() != c.to_json());
    }
}

TEST_CASE("boosting lowers the training log-loss every round") {
    const EncodedMatrix X = synth_matrix(400, EncodingMode::Tree, 8);
    BoostingConfig cfg;
    cfg.rounds = 40;
    const BoostedModel model = fit_boosted(X, cfg, 2);

    REQUIRE(model.train_log_loss.size() == 41); // prior + one entry per round
    for (size_t i = 1; i < model.train_log_loss.size(); ++i) {
        CHECK(model.train_log_loss[i] <= model.train_log_loss[i - 1] + 1e-12);
    }
    CHECK(model.train_log_loss.back() < model.train_log_loss.front());

    for (size_t r = 0; r < 10; ++r) {
        const double p = model.predict_row(X.row(r));
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }

    const BoostedModel back = BoostedModel::from_json(model.to_json());
    CHECK(back.predict_row(X.row(0)) == model.predict_row(X.row(0)));
    CHECK(back.train_log_loss == model.train_log_loss);
}

TEST_CASE("single-class boosting stays at the prior") {
    EncodedMatrix X = labeled(1, {1, 2, 3, 4, 5, 6}, {0, 0, 0, 0, 0, 0});
    const BoostedModel model = fit_boosted(X, BoostingConfig{}, 1);
    REQUIRE(model.warnings.size() == 1);
    CHECK(model.warnings[0].find("single class") != std::string::npos);
    CHECK(model.trees.empty());
    CHECK(model.train_log_loss.size() == 1);
    const double x = 2.0;
    CHECK(model.predict_row(&x) < 1e-9);

    ModelSpec spec;
    spec.kind = ModelKind::GradientBoosting;
    const TrainedModel wrapped = fit_model(spec, X);
    REQUIRE(wrapped.warnings.size() == 1);
    CHECK(wrapped.warnings[0].find("prior probability") != std::string::npos);
}

TEST_CASE("fit_model surfaces degenerate-label warnings and input errors") {
    EncodedMatrix X = labeled(1, {1, 2, 3, 4}, {1, 1, 1, 1});
    ModelSpec rf;
    rf.kind = ModelKind::RandomForest;
    rf.forest.tree_count = 3;
    const TrainedModel model = fit_model(rf, X);
    REQUIRE(model.warnings.size() == 1);
    CHECK(model.warnings[0].find("single class") != std::string::npos);
    CHECK(model.predict_row(X.row(0)) == 1.0);

    EncodedMatrix empty;
    CHECK_THROWS_AS(fit_model(rf, empty), ArgumentError);

    EncodedMatrix bad = labeled(1, {1, 2, 3, 4}, {0, 1});
    CHECK_THROWS_AS(fit_model(rf, bad), ArgumentError);
}

TEST_CASE("classify checks the threshold and the column layout") {
    EncodedMatrix X = synth_matrix(120, EncodingMode::Tree, 14);
    ModelSpec spec;
    spec.kind = ModelKind::RandomForest;
    spec.forest.tree_count = 5;
    const TrainedModel model = fit_model(spec, X);

    CHECK_THROWS_AS(model.classify(X, -0.1), ArgumentError);
    CHECK_THROWS_AS(model.classify(X, 1.5), ArgumentError);

    const auto proba = model.predict_proba(X);
    const auto pred = model.classify(X, 0.5);
    for (size_t i = 0; i < pred.size(); ++i) {
        CHECK(pred[i] == (proba[i] >= 0.5 ? 1 : 0));
    }
    const auto all_pos = model.classify(X, 0.0);
    for (const uint8_t v : all_pos) CHECK(v == 1);

    EncodedMatrix renamed = X;
    renamed.col_names[0] = "imposter";
    CHECK_THROWS_AS(model.predict_proba(renamed), ContractError);
}

TEST_CASE("importance aggregates encoded columns by source feature") {
    // columns 0 and 1 both belong to feature "a"; column 2 is feature "b"
    Rng rng(6);
    const size_t n = 120;
    std::vector<double> values;
    std::vector<uint8_t> labels;
    for (size_t i = 0; i < n; ++i) {
        const uint8_t y = static_cast<uint8_t>(i % 2);
        values.push_back(y ? 1.0 + rng.next_double() : -1.0 - rng.next_double());
        values.push_back(y ? 0.5 + rng.next_double() : -0.5 - rng.next_double());
        values.push_back(rng.next_double()); // pure noise
        labels.push_back(y);
    }
    EncodedMatrix X = labeled(3, values, labels);
    X.col_feature = {0, 0, 1};
    X.source_features = {FeatureId{"a"}, FeatureId{"b"}};

    ModelSpec spec;
    spec.kind = ModelKind::RandomForest;
    spec.forest.tree_count = 20;
    spec.forest.max_depth = 4;
    const TrainedModel model = fit_model(spec, X);

    const auto ranked = model.feature_importance();
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].first.name == "a");
    CHECK(ranked[1].first.name == "b");
    CHECK(ranked[0].second + ranked[1].second == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ranked[0].second > ranked[1].second);

    ModelSpec ann;
    ann.kind = ModelKind::NeuralNet;
    ann.nn.epochs = 1;
    const TrainedModel nn = fit_model(ann, X);
    CHECK_THROWS_AS(nn.feature_importance(), UnsupportedError);
}

TEST_CASE("model artifacts round-trip through files") {
    GeneratorConfig cfg;
    cfg.rows = 150;
    cfg.positive_ratio = 0.3;
    cfg.signal_features = {FeatureId{"creditscore"}};
    const LoanDataset ds = generate_synthetic(cfg, 19);
    const Encoder enc = Encoder::fit(ds, EncodingMode::Tree);
    const EncodedMatrix X = enc.transform(ds);

    ModelSpec spec;
    spec.kind = ModelKind::RandomForest;
    spec.forest.tree_count = 10;
    spec.forest.max_depth = 6;
    const TrainedModel model = fit_model(spec, X);

    const auto path =
        (std::filesystem::temp_directory_path() / "fivec_models_artifact.json").string();
    save_model_artifact(path, model, enc, /*include_timings=*/false);
    const auto [back, enc_back] = load_model_artifact(path);

    CHECK(back.kind == ModelKind::RandomForest);
    CHECK(back.columns == model.columns);
    CHECK(back.train_seconds == 0.0);
    const EncodedMatrix X2 = enc_back.transform(ds);
    for (size_t r = 0; r < 20; ++r) {
        CHECK(back.predict_row(X2.row(r)) == model.predict_row(X.row(r)));
    }
    std::filesystem::remove(path);

    nlohmann::json doc = model_artifact_json(model, enc, true);
    doc["format_version"] = 99;
    CHECK_THROWS_AS(model_artifact_from_json(doc), ParseError);

    nlohmann::json trunc = model_artifact_json(model, enc, true);
    trunc["source_features"] = nlohmann::json::array();
    CHECK_THROWS_AS(model_artifact_from_json(trunc), ParseError);

    CHECK_THROWS_AS(load_model_artifact("/nonexistent/artifact.json"), IoError);
}

} // TEST_SUITE
