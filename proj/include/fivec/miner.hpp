#pragma once

#include "fivec/corpus.hpp"
#include "fivec/rational.hpp"

#include <nlohmann/json_fwd.hpp>

#include <vector>

namespace fivec {

// A frequent feature combination. support_num is the exact number of papers
// containing every feature of the set; support_den is the paper count.
struct ItemSet {
    std::vector<FeatureId> features; // sorted
    long long support_num = 0;
    long long support_den = 1;

    Rational support() const { return Rational{support_num, support_den}; }
};

struct MiningConfig {
    Rational min_support{1, 20}; // 0.05
    int max_len = 8;
    // Worker bound for per-candidate support counting inside one level.
    // <= 1 runs the serial reference path; output is identical either way.
    int jobs = 1;
};

// Exact support of a feature set: (papers containing all features) / (papers).
Rational support(const FeatureCorpus& corpus, const std::vector<FeatureId>& features);

// Level-wise Apriori over the corpus. Returns every itemset with
// |features| <= max_len and support >= min_support, ordered by length then
// lexicographically by feature names. The frequency test is done in integer
// arithmetic (count * den >= num * papers) so a threshold of exactly 0.05
// behaves the same on every platform.
std::vector<ItemSet> mine_frequent(const FeatureCorpus& corpus, const MiningConfig& config);

// Subsequence with |features| == exact_len, input order preserved.
std::vector<ItemSet> filter_by_length(const std::vector<ItemSet>& itemsets, int exact_len);

// Itemset list file: JSON array of {"features": [...], "support": {"num", "den"}}.
// Feature names are alias-canonicalized on read so hand-written fixture
// files behave like mined output.
nlohmann::json itemsets_to_json(const std::vector<ItemSet>& itemsets);
std::vector<ItemSet> itemsets_from_json(const nlohmann::json& doc, const AliasTable& aliases);
std::vector<ItemSet> load_itemsets(const std::string& path, const AliasTable& aliases);

} // namespace fivec
