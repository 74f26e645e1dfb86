#include "fivec/models.hpp"

#include "fivec/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>

namespace fivec {

namespace {

constexpr int kArtifactVersion = 1;

size_t count_positives(const EncodedMatrix& X) {
    size_t k = 0;
    for (const uint8_t label : X.labels) k += label;
    return k;
}

} // namespace

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
    case ModelKind::NeuralNet: return "ANN";
    case ModelKind::LinearSVM: return "SVM";
    case ModelKind::RandomForest: return "RF";
    case ModelKind::ExtraTrees: return "ET";
    case ModelKind::GradientBoosting: return "GB";
    }
    throw ContractError("unreachable model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
    std::string k;
    for (const char c : name) k.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (k == "ann" || k == "neuralnet" || k == "neural_net") return ModelKind::NeuralNet;
    if (k == "svm" || k == "linearsvm" || k == "linear_svm") return ModelKind::LinearSVM;
    if (k == "rf" || k == "randomforest" || k == "random_forest") return ModelKind::RandomForest;
    if (k == "et" || k == "extratrees" || k == "extra_trees") return ModelKind::ExtraTrees;
    if (k == "gb" || k == "gradientboosting" || k == "gradient_boosting") {
        return ModelKind::GradientBoosting;
    }
    throw ArgumentError("unknown model kind: " + name);
}

bool is_tree_kind(ModelKind kind) {
    return kind == ModelKind::RandomForest || kind == ModelKind::ExtraTrees ||
           kind == ModelKind::GradientBoosting;
}

void ModelSpec::validate() const {
    switch (kind) {
    case ModelKind::NeuralNet:
        if (nn.hidden_units == 0) throw ArgumentError("hidden_units must be positive");
        if (nn.epochs == 0) throw ArgumentError("epochs must be positive");
        if (nn.batch_size == 0) throw ArgumentError("batch_size must be positive");
        if (!(nn.learning_rate > 0.0 && nn.learning_rate <= 1.0)) {
            throw ArgumentError("learning_rate must lie in (0, 1]");
        }
        if (!(nn.positive_weight > 0.0)) throw ArgumentError("positive_weight must be positive");
        break;
    case ModelKind::LinearSVM:
        if (!(svm.lambda > 0.0)) throw ArgumentError("lambda must be positive");
        if (svm.epochs == 0) throw ArgumentError("epochs must be positive");
        if (!(svm.positive_weight > 0.0)) throw ArgumentError("positive_weight must be positive");
        break;
    case ModelKind::RandomForest:
    case ModelKind::ExtraTrees:
        if (forest.tree_count == 0) throw ArgumentError("tree_count must be positive");
        if (forest.max_depth == 0) throw ArgumentError("max_depth must be positive");
        break;
    case ModelKind::GradientBoosting:
        if (boosting.max_depth == 0) throw ArgumentError("max_depth must be positive");
        if (!(boosting.learning_rate > 0.0 && boosting.learning_rate <= 1.0)) {
            throw ArgumentError("learning_rate must lie in (0, 1]");
        }
        break;
    }
}

nlohmann::json ModelSpec::to_json() const {
    nlohmann::json hp;
    switch (kind) {
    case ModelKind::NeuralNet:
        hp = {{"hidden_units", nn.hidden_units},
              {"epochs", nn.epochs},
              {"batch_size", nn.batch_size},
              {"learning_rate", nn.learning_rate},
              {"positive_weight", nn.positive_weight}};
        break;
    case ModelKind::LinearSVM:
        hp = {{"lambda", svm.lambda},
              {"epochs", svm.epochs},
              {"positive_weight", svm.positive_weight}};
        break;
    case ModelKind::RandomForest:
    case ModelKind::ExtraTrees:
        hp = {{"tree_count", forest.tree_count},
              {"max_depth", forest.max_depth},
              {"mtry", forest.mtry}};
        break;
    case ModelKind::GradientBoosting:
        hp = {{"rounds", boosting.rounds},
              {"max_depth", boosting.max_depth},
              {"learning_rate", boosting.learning_rate}};
        break;
    }
    return nlohmann::json{{"kind", model_kind_name(kind)},
                          {"seed", seed},
                          {"hyperparameters", std::move(hp)}};
}

ModelSpec ModelSpec::from_json(const nlohmann::json& doc) {
    ModelSpec spec;
    try {
        spec.kind = model_kind_from_name(doc.at("kind").get<std::string>());
        if (doc.contains("seed")) spec.seed = doc.at("seed").get<uint64_t>();
        const nlohmann::json hp =
            doc.contains("hyperparameters") ? doc.at("hyperparameters") : nlohmann::json::object();
        auto get = [&](const char* key, auto& slot) {
            if (hp.contains(key)) slot = hp.at(key).get<std::decay_t<decltype(slot)>>();
        };
        switch (spec.kind) {
        case ModelKind::NeuralNet:
            get("hidden_units", spec.nn.hidden_units);
            get("epochs", spec.nn.epochs);
            get("batch_size", spec.nn.batch_size);
            get("learning_rate", spec.nn.learning_rate);
            get("positive_weight", spec.nn.positive_weight);
            break;
        case ModelKind::LinearSVM:
            get("lambda", spec.svm.lambda);
            get("epochs", spec.svm.epochs);
            get("positive_weight", spec.svm.positive_weight);
            break;
        case ModelKind::RandomForest:
        case ModelKind::ExtraTrees:
            get("tree_count", spec.forest.tree_count);
            get("max_depth", spec.forest.max_depth);
            get("mtry", spec.forest.mtry);
            break;
        case ModelKind::GradientBoosting:
            get("rounds", spec.boosting.rounds);
            get("max_depth", spec.boosting.max_depth);
            get("learning_rate", spec.boosting.learning_rate);
            break;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

TrainedModel fit_model(const ModelSpec& spec, const EncodedMatrix& X) {
    spec.validate();
    if (X.rows == 0) throw ArgumentError("cannot fit a model on an empty matrix");
    if (X.labels.size() != X.rows) throw ArgumentError("label count does not match the matrix");

    TrainedModel model;
    model.kind = spec.kind;
    model.columns = X.col_names;
    model.col_feature = X.col_feature;
    model.source_features = X.source_features;

    const size_t positives = count_positives(X);
    if ((positives == 0 || positives == X.rows) && is_tree_kind(spec.kind) &&
        spec.kind != ModelKind::GradientBoosting) {
        model.warnings.push_back("training labels contain a single class; "
                                 "every leaf holds the same class fraction");
    }

    const auto started = std::chrono::steady_clock::now();
    switch (spec.kind) {
    case ModelKind::NeuralNet:
        model.engine = fit_neural_net(X, spec.nn, spec.seed);
        break;
    case ModelKind::LinearSVM:
        model.engine = fit_linear_svm(X, spec.svm, spec.seed);
        break;
    case ModelKind::RandomForest: {
        ForestConfig config = spec.forest;
        config.bootstrap = true;
        config.random_threshold = false;
        config.jobs = spec.jobs;
        model.engine = fit_forest(X, config, spec.seed);
        break;
    }
    case ModelKind::ExtraTrees: {
        ForestConfig config = spec.forest;
        config.bootstrap = false;
        config.random_threshold = true;
        config.jobs = spec.jobs;
        model.engine = fit_forest(X, config, spec.seed);
        break;
    }
    case ModelKind::GradientBoosting: {
        BoostingConfig config = spec.boosting;
        config.jobs = spec.jobs;
        auto boosted = fit_boosted(X, config, spec.seed);
        model.warnings.insert(model.warnings.end(), boosted.warnings.begin(),
                              boosted.warnings.end());
        model.engine = std::move(boosted);
        break;
    }
    }
    const auto stopped = std::chrono::steady_clock::now();
    model.train_seconds = std::chrono::duration<double>(stopped - started).count();
    return model;
}

double TrainedModel::predict_row(const double* row) const {
    return std::visit([&](const auto& engine) { return engine.predict_row(row); }, engine);
}

std::vector<double> TrainedModel::predict_proba(const EncodedMatrix& X) const {
    if (X.col_names != columns) {
        throw ContractError("matrix columns do not match the model's feature list");
    }
    std::vector<double> out(X.rows);
    for (size_t r = 0; r < X.rows; ++r) out[r] = predict_row(X.row(r));
    return out;
}

std::vector<uint8_t> TrainedModel::classify(const EncodedMatrix& X, double threshold) const {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ArgumentError("classification threshold must lie in [0, 1]");
    }
    const auto proba = predict_proba(X);
    std::vector<uint8_t> out(proba.size());
    for (size_t i = 0; i < proba.size(); ++i) out[i] = proba[i] >= threshold ? 1 : 0;
    return out;
}

std::vector<std::pair<FeatureId, double>> TrainedModel::feature_importance() const {
    const std::vector<double>* per_column = nullptr;
    if (const auto* forest = std::get_if<Forest>(&engine)) {
        per_column = &forest->importance;
    } else if (const auto* boosted = std::get_if<BoostedModel>(&engine)) {
        per_column = &boosted->importance;
    } else {
        throw UnsupportedError("feature importance requires a tree-based model");
    }

    std::vector<std::pair<FeatureId, double>> out;
    for (const auto& f : source_features) out.emplace_back(f, 0.0);
    for (size_t c = 0; c < per_column->size(); ++c) {
        out[col_feature[c]].second += (*per_column)[c];
    }
    double total = 0.0;
    for (const auto& [feature, value] : out) total += value;
    if (total > 0.0) {
        for (auto& [feature, value] : out) value /= total;
    }
    return out;
}

nlohmann::json model_artifact_json(const TrainedModel& model, const Encoder& encoder,
                                   bool include_timings) {
    nlohmann::json engine;
    std::string engine_kind;
    if (const auto* forest = std::get_if<Forest>(&model.engine)) {
        engine = forest->to_json();
        engine_kind = "forest";
    } else if (const auto* boosted = std::get_if<BoostedModel>(&model.engine)) {
        engine = boosted->to_json();
        engine_kind = "boosted";
    } else if (const auto* nn = std::get_if<NeuralNet>(&model.engine)) {
        engine = nn->to_json();
        engine_kind = "neural_net";
    } else {
        engine = std::get<LinearSvm>(model.engine).to_json();
        engine_kind = "linear_svm";
    }
    return nlohmann::json{{"format_version", kArtifactVersion},
                          {"kind", model_kind_name(model.kind)},
                          {"columns", model.columns},
                          {"col_feature", model.col_feature},
                          {"source_features", feature_names(model.source_features)},
                          {"warnings", model.warnings},
                          {"train_seconds", include_timings ? model.train_seconds : 0.0},
                          {"encoder", encoder.to_json()},
                          {"engine_kind", engine_kind},
                          {"engine", std::move(engine)}};
}

std::pair<TrainedModel, Encoder> model_artifact_from_json(const nlohmann::json& doc) {
    TrainedModel model;
    Encoder encoder;
    try {
        const int version = doc.at("format_version").get<int>();
        if (version != kArtifactVersion) {
            throw ParseError("unsupported model artifact version " + std::to_string(version));
        }
        model.kind = model_kind_from_name(doc.at("kind").get<std::string>());
        model.columns = doc.at("columns").get<std::vector<std::string>>();
        model.col_feature = doc.at("col_feature").get<std::vector<size_t>>();
        for (const auto& name : doc.at("source_features")) {
            model.source_features.push_back(FeatureId{name.get<std::string>()});
        }
        model.warnings = doc.at("warnings").get<std::vector<std::string>>();
        model.train_seconds = doc.at("train_seconds").get<double>();
        encoder = Encoder::from_json(doc.at("encoder"));
        const auto engine_kind = doc.at("engine_kind").get<std::string>();
        if (engine_kind == "forest") {
            model.engine = Forest::from_json(doc.at("engine"));
        } else if (engine_kind == "boosted") {
            model.engine = BoostedModel::from_json(doc.at("engine"));
        } else if (engine_kind == "neural_net") {
            model.engine = NeuralNet::from_json(doc.at("engine"));
        } else if (engine_kind == "linear_svm") {
            model.engine = LinearSvm::from_json(doc.at("engine"));
        } else {
            throw ParseError("unknown engine kind: " + engine_kind);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model artifact: ") + e.what());
    }
    for (const size_t f : model.col_feature) {
        if (f >= model.source_features.size()) {
            throw ParseError("model artifact: column provenance out of range");
        }
    }
    if (model.col_feature.size() != model.columns.size()) {
        throw ParseError("model artifact: column provenance length mismatch");
    }
    return {std::move(model), std::move(encoder)};
}

void save_model_artifact(const std::string& path, const TrainedModel& model,
                         const Encoder& encoder, bool include_timings) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model artifact: " + path);
    out << model_artifact_json(model, encoder, include_timings).dump(2) << '\n';
    if (!out) throw IoError("failed writing model artifact: " + path);
}

std::pair<TrainedModel, Encoder> load_model_artifact(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("model artifact not found: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("model artifact " + path + ": " + e.what());
    }
    return model_artifact_from_json(doc);
}

} // namespace fivec
