#pragma once

#include "fivec/boosting.hpp"
#include "fivec/encoding.hpp"
#include "fivec/forest.hpp"
#include "fivec/linear_svm.hpp"
#include "fivec/neural_net.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <string>
#include <variant>
#include <vector>

namespace fivec {

enum class ModelKind { NeuralNet, LinearSVM, RandomForest, ExtraTrees, GradientBoosting };

inline constexpr std::array<ModelKind, 5> kAllModelKinds = {
    ModelKind::NeuralNet, ModelKind::LinearSVM, ModelKind::RandomForest, ModelKind::ExtraTrees,
    ModelKind::GradientBoosting};

// Report labels: ANN, SVM, RF, ET, GB.
std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);
bool is_tree_kind(ModelKind kind);

struct ModelSpec {
    ModelKind kind = ModelKind::RandomForest;
    uint64_t seed = 0;
    size_t jobs = 1;
    NeuralNetConfig nn;
    LinearSvmConfig svm;
    ForestConfig forest;
    BoostingConfig boosting;

    void validate() const; // throws ArgumentError on bad hyperparameters

    nlohmann::json to_json() const;
    static ModelSpec from_json(const nlohmann::json& doc);
};

struct TrainedModel {
    ModelKind kind = ModelKind::RandomForest;
    double train_seconds = 0.0;
    std::vector<std::string> columns;        // encoded column names, fixed at fit
    std::vector<size_t> col_feature;         // encoded column -> source feature index
    std::vector<FeatureId> source_features;  // fit-time features, encoder order
    std::vector<std::string> warnings;
    std::variant<Forest, BoostedModel, NeuralNet, LinearSvm> engine;

    double predict_row(const double* row) const;
    std::vector<double> predict_proba(const EncodedMatrix& X) const;
    std::vector<uint8_t> classify(const EncodedMatrix& X, double threshold = 0.5) const;

    // Mean impurity decrease summed over each source feature's encoded
    // columns, normalized to total 1. Tree-family models only.
    std::vector<std::pair<FeatureId, double>> feature_importance() const;
};

TrainedModel fit_model(const ModelSpec& spec, const EncodedMatrix& X);

// Self-contained prediction artifact: model + the encoder that feeds it,
// versioned so `explain` can reject incompatible files.
nlohmann::json model_artifact_json(const TrainedModel& model, const Encoder& encoder,
                                   bool include_timings);
std::pair<TrainedModel, Encoder> model_artifact_from_json(const nlohmann::json& doc);
void save_model_artifact(const std::string& path, const TrainedModel& model,
                         const Encoder& encoder, bool include_timings);
std::pair<TrainedModel, Encoder> load_model_artifact(const std::string& path);

} // namespace fivec
