#pragma once

#include "fivec/encoding.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <vector>

namespace fivec {

// L2-regularized linear hinge classifier trained by per-sample subgradient
// descent (Pegasos-style 1/(lambda*t) step), with an unregularized bias.
// Probabilities come from a logistic squash of the signed margin. Training
// stops early once a full pass over the data sees no margin violations, so
// on separable data every margin ends >= 1 and the hinge loss is exactly 0.
struct LinearSvmConfig {
    double lambda = 1e-4;
    size_t epochs = 50;
    double positive_weight = 1.0;
};

struct LinearSvm {
    std::vector<double> weights;
    double bias = 0.0;

    double margin(const double* row) const;
    double predict_row(const double* row) const; // sigmoid(margin)
    double hinge_loss(const EncodedMatrix& X) const;

    nlohmann::json to_json() const;
    static LinearSvm from_json(const nlohmann::json& doc);
};

LinearSvm fit_linear_svm(const EncodedMatrix& X, const LinearSvmConfig& config, uint64_t seed);

} // namespace fivec
