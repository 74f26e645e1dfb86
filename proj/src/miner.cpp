#include "fivec/miner.hpp"

#include "fivec/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fivec {

namespace {

// Papers as bitmasks over universe indices; universe is sorted by name, so
// index order and lexicographic name order coincide.
struct BitCorpus {
    size_t words = 0;
    std::vector<std::vector<uint64_t>> papers;

    static BitCorpus build(const FeatureCorpus& corpus) {
        BitCorpus bc;
        const auto& universe = corpus.universe();
        bc.words = (universe.size() + 63) / 64;
        bc.papers.assign(corpus.paper_count(), std::vector<uint64_t>(bc.words, 0));
        for (size_t p = 0; p < corpus.paper_count(); ++p) {
            for (const auto& f : corpus.papers()[p].features) {
                const auto it = std::lower_bound(universe.begin(), universe.end(), f);
                const size_t idx = static_cast<size_t>(it - universe.begin());
                bc.papers[p][idx / 64] |= (1ULL << (idx % 64));
            }
        }
        return bc;
    }

    long long count_containing(const std::vector<uint64_t>& candidate_mask) const {
        long long n = 0;
        for (const auto& paper : papers) {
            bool all = true;
            for (size_t w = 0; w < words; ++w) {
                if ((paper[w] & candidate_mask[w]) != candidate_mask[w]) {
                    all = false;
                    break;
                }
            }
            if (all) ++n;
        }
        return n;
    }
};

using Candidate = std::vector<int>; // sorted universe indices

std::vector<uint64_t> candidate_mask(const Candidate& c, size_t words) {
    std::vector<uint64_t> mask(words, 0);
    for (const int idx : c) mask[static_cast<size_t>(idx) / 64] |= (1ULL << (idx % 64));
    return mask;
}

// Counts papers containing each candidate. Candidates are independent, so
// the parallel path writes one slot per candidate and matches the serial
// reference for every worker count.
std::vector<long long> count_supports(const BitCorpus& bc, const std::vector<Candidate>& candidates,
                                      int jobs) {
    std::vector<long long> counts(candidates.size(), 0);
#ifdef _OPENMP
    if (jobs > 1) {
#pragma omp parallel for schedule(dynamic, 16) num_threads(jobs)
        for (long long i = 0; i < static_cast<long long>(candidates.size()); ++i) {
            counts[static_cast<size_t>(i)] =
                bc.count_containing(candidate_mask(candidates[static_cast<size_t>(i)], bc.words));
        }
        return counts;
    }
#else
    (void)jobs;
#endif
    for (size_t i = 0; i < candidates.size(); ++i) {
        counts[i] = bc.count_containing(candidate_mask(candidates[i], bc.words));
    }
    return counts;
}

// count/total >= min_support without leaving integer arithmetic.
bool frequent(long long count, long long total, const Rational& min_support) {
    return static_cast<__int128>(count) * min_support.den >=
           static_cast<__int128>(min_support.num) * total;
}

// Apriori join: two sorted k-sets sharing their first k-1 items produce one
// (k+1)-candidate; the prune step then requires every k-subset frequent.
std::vector<Candidate> generate_candidates(const std::vector<Candidate>& frequent_k) {
    std::set<Candidate> frequent_lookup(frequent_k.begin(), frequent_k.end());
    std::vector<Candidate> out;
    for (size_t a = 0; a < frequent_k.size(); ++a) {
        for (size_t b = a + 1; b < frequent_k.size(); ++b) {
            const Candidate& x = frequent_k[a];
            const Candidate& y = frequent_k[b];
            if (!std::equal(x.begin(), x.end() - 1, y.begin())) continue;
            Candidate joined(x);
            const int lo = std::min(x.back(), y.back());
            const int hi = std::max(x.back(), y.back());
            joined.back() = lo;
            joined.push_back(hi);

            bool all_subsets_frequent = true;
            Candidate subset(joined.begin() + 1, joined.end());
            for (size_t drop = 0; drop < joined.size(); ++drop) {
                if (frequent_lookup.find(subset) == frequent_lookup.end()) {
                    all_subsets_frequent = false;
                    break;
                }
                if (drop + 1 < joined.size()) subset[drop] = joined[drop];
            }
            if (all_subsets_frequent) out.push_back(std::move(joined));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

Rational support(const FeatureCorpus& corpus, const std::vector<FeatureId>& features) {
    if (features.empty()) throw ArgumentError("support of an empty feature set is undefined");
    long long count = 0;
    for (size_t p = 0; p < corpus.paper_count(); ++p) {
        bool all = true;
        for (const auto& f : features) {
            if (!corpus.paper_contains(p, f)) {
                all = false;
                break;
            }
        }
        if (all) ++count;
    }
    return Rational{count, static_cast<long long>(corpus.paper_count())};
}

std::vector<ItemSet> mine_frequent(const FeatureCorpus& corpus, const MiningConfig& config) {
    if (config.max_len < 1) throw ArgumentError("max_len must be >= 1");
    if (config.min_support.num <= 0 || rat_less(Rational{1, 1}, config.min_support)) {
        throw ArgumentError("min_support must lie in (0, 1]");
    }

    const BitCorpus bc = BitCorpus::build(corpus);
    const auto& universe = corpus.universe();
    const long long total = static_cast<long long>(corpus.paper_count());

    std::vector<ItemSet> result;
    std::vector<Candidate> level;
    for (int i = 0; i < static_cast<int>(universe.size()); ++i) level.push_back({i});

    for (int k = 1; k <= config.max_len && !level.empty(); ++k) {
        const std::vector<long long> counts = count_supports(bc, level, config.jobs);
        std::vector<Candidate> frequent_k;
        for (size_t i = 0; i < level.size(); ++i) {
            if (!frequent(counts[i], total, config.min_support)) continue;
            frequent_k.push_back(level[i]);
            ItemSet set;
            set.features.reserve(level[i].size());
            for (const int idx : level[i]) set.features.push_back(universe[static_cast<size_t>(idx)]);
            set.support_num = counts[i];
            set.support_den = total;
            result.push_back(std::move(set));
        }
        if (k == config.max_len) break;
        level = generate_candidates(frequent_k);
    }
    return result;
}

std::vector<ItemSet> filter_by_length(const std::vector<ItemSet>& itemsets, int exact_len) {
    if (exact_len < 1) throw ArgumentError("exact_len must be >= 1");
    std::vector<ItemSet> out;
    for (const auto& s : itemsets) {
        if (static_cast<int>(s.features.size()) == exact_len) out.push_back(s);
    }
    return out;
}

nlohmann::json itemsets_to_json(const std::vector<ItemSet>& itemsets) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : itemsets) {
        arr.push_back({{"features", feature_names(s.features)},
                       {"support", {{"num", s.support_num}, {"den", s.support_den}}}});
    }
    return arr;
}

std::vector<ItemSet> itemsets_from_json(const nlohmann::json& doc, const AliasTable& aliases) {
    if (!doc.is_array()) throw ValidationError("itemset file must be a top-level JSON array");
    std::vector<ItemSet> out;
    out.reserve(doc.size());
    for (size_t i = 0; i < doc.size(); ++i) {
        const auto& rec = doc[i];
        const std::string where = "itemset " + std::to_string(i);
        if (!rec.is_object() || !rec.contains("features") || !rec["features"].is_array() ||
            !rec.contains("support") || !rec["support"].is_object()) {
            throw ValidationError(where + " must be {features: [...], support: {num, den}}");
        }
        ItemSet s;
        for (const auto& f : rec["features"]) {
            if (!f.is_string()) throw ValidationError(where + " has a non-string feature");
            s.features.push_back(aliases.canon(f.get<std::string>()));
        }
        std::sort(s.features.begin(), s.features.end());
        s.support_num = rec["support"].value("num", -1LL);
        s.support_den = rec["support"].value("den", 0LL);
        if (s.support_num < 0 || s.support_den <= 0 || s.support_num > s.support_den) {
            throw ValidationError(where + " has an invalid support fraction");
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ItemSet> load_itemsets(const std::string& path, const AliasTable& aliases) {
    std::ifstream in(path);
    if (!in) throw IoError("itemset file not found: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("itemset file " + path + ": " + e.what());
    }
    return itemsets_from_json(doc, aliases);
}

} // namespace fivec
