#include "fivec/forest.hpp"

#include "fivec/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace fivec {

double Forest::predict_row(const double* row) const {
    if (trees.empty()) throw ContractError("predict on an untrained forest");
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.predict(row);
    return sum / static_cast<double>(trees.size());
}

Forest fit_forest(const EncodedMatrix& X, const ForestConfig& config, uint64_t seed) {
    if (config.tree_count == 0) throw ArgumentError("forest needs at least one tree");
    if (X.rows == 0) throw ArgumentError("cannot fit a forest on an empty matrix");

    TreeGrowth growth;
    growth.max_depth = config.max_depth;
    growth.random_threshold = config.random_threshold;
    growth.mtry = config.mtry != 0
                      ? config.mtry
                      : static_cast<size_t>(std::ceil(std::sqrt(static_cast<double>(X.cols))));

    std::vector<double> y(X.rows);
    for (size_t r = 0; r < X.rows; ++r) y[r] = static_cast<double>(X.labels[r]);

    Forest forest;
    forest.trees.resize(config.tree_count);
    // Per-tree importance slabs keep parallel accumulation associative and
    // the result independent of the worker count.
    std::vector<std::vector<double>> slabs(config.tree_count);

    auto build_one = [&](size_t t) {
        Rng rng(mix_seed(seed, t));
        std::vector<uint32_t> rows(X.rows);
        if (config.bootstrap) {
            for (auto& r : rows) r = static_cast<uint32_t>(rng.next_below(X.rows));
        } else {
            for (size_t r = 0; r < X.rows; ++r) rows[r] = static_cast<uint32_t>(r);
        }
        slabs[t].assign(X.cols, 0.0);
        forest.trees[t] = grow_tree(X, y, rows, growth, rng, &slabs[t]);
    };

    const auto count = static_cast<long long>(config.tree_count);
    if (config.jobs > 1) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) num_threads(static_cast<int>(config.jobs))
#endif
        for (long long t = 0; t < count; ++t) build_one(static_cast<size_t>(t));
    } else {
        for (long long t = 0; t < count; ++t) build_one(static_cast<size_t>(t));
    }

    forest.importance.assign(X.cols, 0.0);
    for (const auto& slab : slabs) {
        for (size_t c = 0; c < X.cols; ++c) forest.importance[c] += slab[c];
    }
    return forest;
}

nlohmann::json Forest::to_json() const {
    nlohmann::json trees_json = nlohmann::json::array();
    for (const auto& tree : trees) trees_json.push_back(tree.to_json());
    return nlohmann::json{{"trees", std::move(trees_json)}, {"importance", importance}};
}

Forest Forest::from_json(const nlohmann::json& doc) {
    Forest forest;
    try {
        for (const auto& item : doc.at("trees")) forest.trees.push_back(Tree::from_json(item));
        forest.importance = doc.at("importance").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("forest payload: ") + e.what());
    }
    if (forest.trees.empty()) throw ParseError("forest payload: no trees");
    return forest;
}

} // namespace fivec
