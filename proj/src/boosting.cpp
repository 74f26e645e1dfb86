#include "fivec/boosting.hpp"

#include "fivec/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace fivec {

namespace {

constexpr double kProbEps = 1e-12;
constexpr double kLeafClamp = 4.0; // bound on a single Newton leaf step

double log_loss(const std::vector<double>& p, const std::vector<uint8_t>& y) {
    double total = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const double q = std::clamp(p[i], kProbEps, 1.0 - kProbEps);
        total += y[i] ? -std::log(q) : -std::log(1.0 - q);
    }
    return total / static_cast<double>(p.size());
}

} // namespace

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double BoostedModel::predict_margin(const double* row) const {
    double score = init_score;
    for (const auto& tree : trees) score += learning_rate * tree.predict(row);
    return score;
}

double BoostedModel::predict_row(const double* row) const {
    return sigmoid(predict_margin(row));
}

BoostedModel fit_boosted(const EncodedMatrix& X, const BoostingConfig& config, uint64_t seed) {
    if (X.rows == 0) throw ArgumentError("cannot fit boosting on an empty matrix");
    if (!(config.learning_rate > 0.0 && config.learning_rate <= 1.0)) {
        throw ArgumentError("boosting learning rate must lie in (0, 1]");
    }

    const size_t n = X.rows;
    size_t positives = 0;
    for (const uint8_t label : X.labels) positives += label;

    BoostedModel model;
    model.learning_rate = config.learning_rate;
    model.importance.assign(X.cols, 0.0);

    const double base_rate = std::clamp(
        static_cast<double>(positives) / static_cast<double>(n), kProbEps, 1.0 - kProbEps);
    model.init_score = std::log(base_rate / (1.0 - base_rate));

    std::vector<double> margin(n, model.init_score);
    std::vector<double> proba(n);
    for (size_t i = 0; i < n; ++i) proba[i] = sigmoid(margin[i]);
    model.train_log_loss.push_back(log_loss(proba, X.labels));

    if (positives == 0 || positives == n) {
        // Single-class input: the prior is already the optimum; boosting
        // rounds would chase zero residuals.
        model.warnings.push_back("training labels contain a single class; "
                                 "model fixed at the prior probability");
        return model;
    }

    TreeGrowth growth;
    growth.max_depth = config.max_depth;
    growth.regression = true;

    std::vector<uint32_t> all_rows(n);
    for (size_t i = 0; i < n; ++i) all_rows[i] = static_cast<uint32_t>(i);

    std::vector<double> residual(n);
    for (size_t round = 0; round < config.rounds; ++round) {
        for (size_t i = 0; i < n; ++i) residual[i] = static_cast<double>(X.labels[i]) - proba[i];

        Rng rng(mix_seed(seed, round));
        Tree tree = grow_tree(X, residual, all_rows, growth, rng, &model.importance);

        // One Newton-Raphson step per leaf: sum of residuals over the
        // leaf's Hessian sum p(1-p), replacing the fitted mean residual.
        std::vector<double> num(tree.nodes.size(), 0.0);
        std::vector<double> den(tree.nodes.size(), 0.0);
        std::vector<size_t> leaf_of(n);
        for (size_t i = 0; i < n; ++i) {
            const size_t leaf = tree.apply(X.row(i));
            leaf_of[i] = leaf;
            num[leaf] += residual[i];
            den[leaf] += proba[i] * (1.0 - proba[i]);
        }
        for (size_t node = 0; node < tree.nodes.size(); ++node) {
            if (tree.nodes[node].feature >= 0) continue;
            const double step = den[node] > 0.0 ? num[node] / den[node] : 0.0;
            tree.nodes[node].value = std::clamp(step, -kLeafClamp, kLeafClamp);
        }

        for (size_t i = 0; i < n; ++i) {
            margin[i] += config.learning_rate * tree.nodes[leaf_of[i]].value;
            proba[i] = sigmoid(margin[i]);
        }
        model.train_log_loss.push_back(log_loss(proba, X.labels));
        model.trees.push_back(std::move(tree));
    }
    return model;
}

nlohmann::json BoostedModel::to_json() const {
    nlohmann::json trees_json = nlohmann::json::array();
    for (const auto& tree : trees) trees_json.push_back(tree.to_json());
    return nlohmann::json{{"init_score", init_score},
                          {"learning_rate", learning_rate},
                          {"trees", std::move(trees_json)},
                          {"importance", importance},
                          {"train_log_loss", train_log_loss},
                          {"warnings", warnings}};
}

BoostedModel BoostedModel::from_json(const nlohmann::json& doc) {
    BoostedModel model;
    try {
        model.init_score = doc.at("init_score").get<double>();
        model.learning_rate = doc.at("learning_rate").get<double>();
        for (const auto& item : doc.at("trees")) model.trees.push_back(Tree::from_json(item));
        model.importance = doc.at("importance").get<std::vector<double>>();
        model.train_log_loss = doc.at("train_log_loss").get<std::vector<double>>();
        model.warnings = doc.at("warnings").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("boosting payload: ") + e.what());
    }
    return model;
}

} // namespace fivec
