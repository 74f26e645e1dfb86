#include "fivec/tree.hpp"

#include "fivec/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace fivec {

namespace {

// Response stats for a node or one side of a candidate split.
struct Stats {
    double n = 0.0;
    double sum = 0.0;
    double sumsq = 0.0;

    void add(double y) {
        n += 1.0;
        sum += y;
        sumsq += y * y;
    }
};

// Gini for 0/1 responses, variance for regression — both from the same sums.
double impurity_of(const Stats& s, bool regression) {
    if (s.n <= 0.0) return 0.0;
    const double mean = s.sum / s.n;
    if (regression) {
        const double v = s.sumsq / s.n - mean * mean;
        return v > 0.0 ? v : 0.0;
    }
    return 2.0 * mean * (1.0 - mean);
}

constexpr double kMinGain = 1e-12;

struct SplitChoice {
    bool found = false;
    size_t column = 0;
    double threshold = 0.0;
    bool equality = false;
    double gain = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const EncodedMatrix& X, const std::vector<double>& y, const TreeGrowth& growth,
                Rng& rng, std::vector<double>* importance, double total_rows)
        : X_(X), y_(y), growth_(growth), rng_(rng), importance_(importance),
          total_rows_(total_rows) {}

    Tree build(std::vector<uint32_t> rows) {
        Tree tree;
        grow(tree, std::move(rows), 0);
        return tree;
    }

private:
    const EncodedMatrix& X_;
    const std::vector<double>& y_;
    const TreeGrowth& growth_;
    Rng& rng_;
    std::vector<double>* importance_;
    double total_rows_;

    int32_t grow(Tree& tree, std::vector<uint32_t> rows, size_t depth) {
        Stats node_stats;
        for (const uint32_t r : rows) node_stats.add(y_[r]);
        const double node_impurity = impurity_of(node_stats, growth_.regression);

        const auto node_index = static_cast<int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[node_index].value = node_stats.sum / node_stats.n;

        if (depth >= growth_.max_depth || rows.size() < growth_.min_samples_split ||
            node_impurity <= 0.0) {
            return node_index;
        }

        const SplitChoice split = pick_split(rows, node_impurity);
        if (!split.found) return node_index;

        if (importance_) {
            (*importance_)[split.column] += (node_stats.n / total_rows_) * split.gain;
        }

        std::vector<uint32_t> left, right;
        left.reserve(rows.size());
        right.reserve(rows.size());
        for (const uint32_t r : rows) {
            const double x = X_.at(r, split.column);
            const bool go_left = split.equality ? (x == split.threshold) : (x < split.threshold);
            (go_left ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        tree.nodes[node_index].feature = static_cast<int32_t>(split.column);
        tree.nodes[node_index].threshold = split.threshold;
        tree.nodes[node_index].equality = split.equality ? 1 : 0;
        const int32_t l = grow(tree, std::move(left), depth + 1);
        tree.nodes[node_index].left = l;
        const int32_t r = grow(tree, std::move(right), depth + 1);
        tree.nodes[node_index].right = r;
        return node_index;
    }

    std::vector<size_t> candidate_columns() {
        const size_t d = X_.cols;
        if (growth_.mtry == 0 || growth_.mtry >= d) {
            std::vector<size_t> all(d);
            for (size_t i = 0; i < d; ++i) all[i] = i;
            return all;
        }
        // Partial Fisher-Yates, then ascending so gain ties resolve toward
        // the lowest column index.
        std::vector<size_t> pool(d);
        for (size_t i = 0; i < d; ++i) pool[i] = i;
        for (size_t i = 0; i < growth_.mtry; ++i) {
            const size_t j = i + static_cast<size_t>(rng_.next_below(d - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(growth_.mtry);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    SplitChoice pick_split(const std::vector<uint32_t>& rows, double node_impurity) {
        SplitChoice best;
        const double n = static_cast<double>(rows.size());
        for (const size_t c : candidate_columns()) {
            if (X_.col_is_categorical[c]) {
                consider_categorical(rows, c, n, node_impurity, best);
            } else {
                consider_numeric(rows, c, n, node_impurity, best);
            }
        }
        return best;
    }

    void offer(SplitChoice& best, size_t column, double threshold, bool equality, double gain) {
        if (gain <= kMinGain) return;
        // Strict improvement only: columns arrive in ascending order and
        // thresholds ascend within a column, so ties keep the earlier one.
        if (best.found && gain <= best.gain) return;
        best = SplitChoice{true, column, threshold, equality, gain};
    }

    void consider_categorical(const std::vector<uint32_t>& rows, size_t c, double n,
                              double node_impurity, SplitChoice& best) {
        std::map<double, Stats> groups;
        Stats all;
        for (const uint32_t r : rows) {
            const double x = X_.at(r, c);
            groups[x].add(y_[r]);
            all.add(y_[r]);
        }
        if (groups.size() < 2) return;

        auto gain_for = [&](const std::pair<const double, Stats>& g) {
            const Stats& left = g.second;
            Stats right;
            right.n = all.n - left.n;
            right.sum = all.sum - left.sum;
            right.sumsq = all.sumsq - left.sumsq;
            const double weighted = (left.n / n) * impurity_of(left, growth_.regression) +
                                    (right.n / n) * impurity_of(right, growth_.regression);
            return node_impurity - weighted;
        };

        if (growth_.random_threshold) {
            const size_t pick = static_cast<size_t>(rng_.next_below(groups.size()));
            auto it = groups.begin();
            std::advance(it, pick);
            offer(best, c, it->first, true, gain_for(*it));
            return;
        }
        for (const auto& g : groups) offer(best, c, g.first, true, gain_for(g));
    }

    void consider_numeric(const std::vector<uint32_t>& rows, size_t c, double n,
                          double node_impurity, SplitChoice& best) {
        std::vector<std::pair<double, double>> xy;
        xy.reserve(rows.size());
        Stats all;
        double lo = 0.0, hi = 0.0;
        bool first = true;
        for (const uint32_t r : rows) {
            const double x = X_.at(r, c);
            xy.emplace_back(x, y_[r]);
            all.add(y_[r]);
            if (first) {
                lo = hi = x;
                first = false;
            } else {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        }
        if (!(hi > lo)) return;

        auto gain_at = [&](const Stats& left) {
            Stats right;
            right.n = all.n - left.n;
            right.sum = all.sum - left.sum;
            right.sumsq = all.sumsq - left.sumsq;
            const double weighted = (left.n / n) * impurity_of(left, growth_.regression) +
                                    (right.n / n) * impurity_of(right, growth_.regression);
            return node_impurity - weighted;
        };

        if (growth_.random_threshold) {
            // Uniform cut in (lo, hi]; the low end always lands left.
            const double t = lo + rng_.next_double_open() * (hi - lo);
            Stats left;
            for (const auto& [x, y] : xy) {
                if (x < t) left.add(y);
            }
            if (left.n > 0.0 && left.n < all.n) offer(best, c, t, false, gain_at(left));
            return;
        }

        std::sort(xy.begin(), xy.end());
        Stats left;
        for (size_t i = 0; i + 1 < xy.size(); ++i) {
            left.add(xy[i].second);
            if (xy[i].first == xy[i + 1].first) continue;
            const double t = xy[i].first + 0.5 * (xy[i + 1].first - xy[i].first);
            if (!(t > xy[i].first)) continue; // adjacent floats; midpoint collapses
            offer(best, c, t, false, gain_at(left));
        }
    }
};

} // namespace

double Tree::predict(const double* row) const {
    return nodes[apply(row)].value;
}

size_t Tree::apply(const double* row) const {
    if (nodes.empty()) throw ContractError("predict on an untrained tree");
    size_t i = 0;
    while (nodes[i].feature >= 0) {
        const auto& nd = nodes[i];
        const double x = row[nd.feature];
        const bool go_left = nd.equality ? (x == nd.threshold) : (x < nd.threshold);
        i = static_cast<size_t>(go_left ? nd.left : nd.right);
    }
    return i;
}

size_t Tree::leaf_count() const {
    size_t k = 0;
    for (const auto& nd : nodes) {
        if (nd.feature < 0) ++k;
    }
    return k;
}

nlohmann::json Tree::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& nd : nodes) {
        if (nd.feature < 0) {
            arr.push_back(nlohmann::json{{"v", nd.value}});
        } else {
            arr.push_back(nlohmann::json{{"f", nd.feature},
                                         {"t", nd.threshold},
                                         {"eq", nd.equality != 0},
                                         {"l", nd.left},
                                         {"r", nd.right},
                                         {"v", nd.value}});
        }
    }
    return arr;
}

Tree Tree::from_json(const nlohmann::json& doc) {
    Tree tree;
    try {
        for (const auto& item : doc) {
            TreeNode nd;
            nd.value = item.at("v").get<double>();
            if (item.contains("f")) {
                nd.feature = item.at("f").get<int32_t>();
                nd.threshold = item.at("t").get<double>();
                nd.equality = item.at("eq").get<bool>() ? 1 : 0;
                nd.left = item.at("l").get<int32_t>();
                nd.right = item.at("r").get<int32_t>();
            }
            tree.nodes.push_back(nd);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("tree payload: ") + e.what());
    }
    if (tree.nodes.empty()) throw ParseError("tree payload: no nodes");
    for (const auto& nd : tree.nodes) {
        if (nd.feature < 0) continue;
        const auto size = static_cast<int32_t>(tree.nodes.size());
        if (nd.left < 0 || nd.left >= size || nd.right < 0 || nd.right >= size) {
            throw ParseError("tree payload: child index out of range");
        }
    }
    return tree;
}

Tree grow_tree(const EncodedMatrix& X, const std::vector<double>& y,
               const std::vector<uint32_t>& rows, const TreeGrowth& growth, Rng& rng,
               std::vector<double>* importance) {
    if (rows.empty()) throw ArgumentError("cannot grow a tree from zero rows");
    if (X.rows != y.size()) throw ArgumentError("response length does not match the matrix");
    if (importance && importance->size() != X.cols) {
        throw ArgumentError("importance accumulator width does not match the matrix");
    }
    TreeBuilder builder(X, y, growth, rng, importance, static_cast<double>(rows.size()));
    return builder.build(rows);
}

} // namespace fivec
