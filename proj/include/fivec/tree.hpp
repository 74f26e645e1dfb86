#pragma once

#include "fivec/encoding.hpp"
#include "fivec/rng.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <vector>

namespace fivec {

// Binary CART node. Numeric splits send x < threshold left; categorical
// splits (tree-encoded category codes) send x == threshold left, the rest
// right. Leaves carry the mean response of their training rows, i.e. the
// positive-class fraction when the response is 0/1 labels.
struct TreeNode {
    int32_t feature = -1; // encoded column; -1 marks a leaf
    double threshold = 0.0;
    uint8_t equality = 0; // 1 = categorical equality partition
    int32_t left = -1;
    int32_t right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes; // nodes[0] is the root; empty = untrained

    double predict(const double* row) const;
    size_t apply(const double* row) const; // index of the reached leaf
    size_t leaf_count() const;

    nlohmann::json to_json() const;
    static Tree from_json(const nlohmann::json& doc);
};

struct TreeGrowth {
    size_t max_depth = 12;
    size_t min_samples_split = 2;
    size_t mtry = 0;               // candidate columns per split; 0 = all
    bool random_threshold = false; // uniform cut instead of best gain
    bool regression = false;       // variance criterion instead of Gini
};

// Grows one tree on the responses `y` restricted to `rows` (indices into X,
// duplicates allowed for bootstrap samples). When `importance` is non-null
// it must have one slot per encoded column; each split adds its weighted
// impurity decrease, (n_node/n_total)*(parent - weighted child impurity).
// Split-gain ties break toward the lowest column index, then the lowest
// threshold.
Tree grow_tree(const EncodedMatrix& X, const std::vector<double>& y,
               const std::vector<uint32_t>& rows, const TreeGrowth& growth, Rng& rng,
               std::vector<double>* importance);

} // namespace fivec
