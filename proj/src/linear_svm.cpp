#include "fivec/linear_svm.hpp"

#include "fivec/boosting.hpp" // sigmoid
#include "fivec/errors.hpp"
#include "fivec/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace fivec {

double LinearSvm::margin(const double* row) const {
    if (weights.empty()) throw ContractError("predict on an untrained svm");
    double m = bias;
    for (size_t i = 0; i < weights.size(); ++i) m += weights[i] * row[i];
    return m;
}

double LinearSvm::predict_row(const double* row) const {
    return sigmoid(margin(row));
}

double LinearSvm::hinge_loss(const EncodedMatrix& X) const {
    if (X.cols != weights.size()) throw ContractError("matrix width does not match the svm");
    double total = 0.0;
    for (size_t r = 0; r < X.rows; ++r) {
        const double s = X.labels[r] ? 1.0 : -1.0;
        total += std::max(0.0, 1.0 - s * margin(X.row(r)));
    }
    return X.rows == 0 ? 0.0 : total / static_cast<double>(X.rows);
}

LinearSvm fit_linear_svm(const EncodedMatrix& X, const LinearSvmConfig& config, uint64_t seed) {
    if (X.rows == 0) throw ArgumentError("cannot fit an svm on an empty matrix");
    if (!(config.lambda > 0.0)) throw ArgumentError("svm lambda must be positive");

    LinearSvm svm;
    svm.weights.assign(X.cols, 0.0);

    Rng rng(seed);
    std::vector<uint32_t> order(X.rows);
    for (size_t i = 0; i < X.rows; ++i) order[i] = static_cast<uint32_t>(i);

    size_t t = 0;
    for (size_t epoch = 0; epoch < config.epochs; ++epoch) {
        // Early stop: with every margin >= 1 the hinge subgradient is zero
        // everywhere, and skipping further regularization shrink keeps it so.
        bool any_violation = false;
        for (size_t r = 0; r < X.rows; ++r) {
            const double s = X.labels[r] ? 1.0 : -1.0;
            if (s * svm.margin(X.row(r)) < 1.0) {
                any_violation = true;
                break;
            }
        }
        if (!any_violation) break;

        rng.shuffle(order);
        for (const uint32_t r : order) {
            ++t;
            const double eta = 1.0 / (config.lambda * static_cast<double>(t));
            const double s = X.labels[r] ? 1.0 : -1.0;
            const double w = X.labels[r] ? config.positive_weight : 1.0;
            const bool violated = s * svm.margin(X.row(r)) < 1.0;

            const double shrink = 1.0 - eta * config.lambda;
            for (auto& wi : svm.weights) wi *= shrink;
            if (violated) {
                const double* x = X.row(r);
                for (size_t i = 0; i < svm.weights.size(); ++i) {
                    svm.weights[i] += eta * w * s * x[i];
                }
                svm.bias += eta * w * s;
            }
        }
    }
    return svm;
}

nlohmann::json LinearSvm::to_json() const {
    return nlohmann::json{{"weights", weights}, {"bias", bias}};
}

LinearSvm LinearSvm::from_json(const nlohmann::json& doc) {
    LinearSvm svm;
    try {
        svm.weights = doc.at("weights").get<std::vector<double>>();
        svm.bias = doc.at("bias").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("svm payload: ") + e.what());
    }
    if (svm.weights.empty()) throw ParseError("svm payload: no weights");
    return svm;
}

} // namespace fivec
