#pragma once

#include "fivec/tree.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace fivec {

// Stagewise logistic boosting: shallow regression trees fitted to the
// log-loss residuals y - p, leaf values replaced by one Newton step
// (sum residual / sum p(1-p), clamped) and shrunk by the learning rate.
struct BoostingConfig {
    size_t rounds = 100;
    size_t max_depth = 3;
    double learning_rate = 0.1;
    size_t jobs = 1; // prediction fan-out; fitting is inherently sequential
};

struct BoostedModel {
    double init_score = 0.0; // prior log-odds of the training base rate
    double learning_rate = 0.1;
    std::vector<Tree> trees;
    std::vector<double> importance;     // per encoded column
    std::vector<double> train_log_loss; // mean log-loss after each round
    std::vector<std::string> warnings;

    double predict_margin(const double* row) const;
    double predict_row(const double* row) const; // sigmoid(margin)

    nlohmann::json to_json() const;
    static BoostedModel from_json(const nlohmann::json& doc);
};

BoostedModel fit_boosted(const EncodedMatrix& X, const BoostingConfig& config, uint64_t seed);

double sigmoid(double z);

} // namespace fivec
