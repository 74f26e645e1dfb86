#pragma once

#include "fivec/tree.hpp"

#include <nlohmann/json_fwd.hpp>

#include <vector>

namespace fivec {

// Bagged tree ensemble covering both classic random forests (bootstrap
// rows, best-gain thresholds) and extremely randomized trees (full sample,
// uniform random thresholds). Probabilities are the mean leaf class
// fraction across trees.
struct ForestConfig {
    size_t tree_count = 100;
    size_t max_depth = 12;
    size_t mtry = 0; // 0 = ceil(sqrt(encoded columns)), resolved at fit
    bool bootstrap = true;
    bool random_threshold = false;
    size_t jobs = 1;
};

struct Forest {
    std::vector<Tree> trees;
    std::vector<double> importance; // per encoded column, summed over trees

    double predict_row(const double* row) const;

    nlohmann::json to_json() const;
    static Forest from_json(const nlohmann::json& doc);
};

// Deterministic per (config, seed) and independent of `jobs`: tree t draws
// everything from its own stream seeded by mix_seed(seed, t).
Forest fit_forest(const EncodedMatrix& X, const ForestConfig& config, uint64_t seed);

} // namespace fivec
