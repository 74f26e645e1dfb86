#include "fivec/encoding.hpp"
#include "fivec/errors.hpp"
#include "fivec/forest.hpp"
#include "fivec/loans.hpp"
#include "fivec/rng.hpp"

#include <algorithm>
#include <numeric>

namespace fivec {

// Lives apart from loans.cpp because it pulls in the model stack.
std::vector<FeatureId> select_features(const LoanDataset& ds, size_t keep, uint64_t seed) {
    if (keep == 0) throw ArgumentError("keep must be positive");
    if (keep > ds.column_count()) {
        throw ArgumentError("keep = " + std::to_string(keep) + " exceeds the " +
                            std::to_string(ds.column_count()) + " feature columns");
    }

    SplitSpec split_spec;
    split_spec.train_fraction = 0.7;
    split_spec.seed = seed;
    const SplitResult split = stratified_split(ds, split_spec);

    const Encoder encoder = Encoder::fit(split.train, EncodingMode::Tree);
    const EncodedMatrix X = encoder.transform(split.train);

    ForestConfig config;
    const Forest forest = fit_forest(X, config, mix_seed(seed, 1));

    std::vector<double> per_feature(X.source_features.size(), 0.0);
    for (size_t c = 0; c < forest.importance.size(); ++c) {
        per_feature[X.col_feature[c]] += forest.importance[c];
    }

    std::vector<size_t> order(per_feature.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (per_feature[a] != per_feature[b]) return per_feature[a] > per_feature[b];
        return X.source_features[a] < X.source_features[b];
    });

    std::vector<FeatureId> selected;
    selected.reserve(keep);
    for (size_t i = 0; i < keep; ++i) selected.push_back(X.source_features[order[i]]);
    return selected;
}

} // namespace fivec
