#pragma once

#include "fivec/feature.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace fivec {

// One literature source and the explanatory variables it uses.
struct PaperRecord {
    std::string paper_id;
    std::vector<FeatureId> features; // sorted, unique
};

// The mined input: which papers use which features. Immutable after load;
// readable from any number of threads.
class FeatureCorpus {
public:
    FeatureCorpus(std::vector<PaperRecord> papers);

    size_t paper_count() const { return papers_.size(); }
    const std::vector<PaperRecord>& papers() const { return papers_; }
    const std::vector<FeatureId>& universe() const { return universe_; }

    bool paper_contains(size_t paper_index, const FeatureId& f) const;

private:
    std::vector<PaperRecord> papers_;
    std::vector<FeatureId> universe_; // union of all paper feature sets, sorted
};

// Corpus file: top-level JSON array of {"paper_id": str, "features": [str...]}.
FeatureCorpus load_corpus(const std::string& path, const AliasTable& aliases);
FeatureCorpus parse_corpus(const nlohmann::json& doc, const AliasTable& aliases);
nlohmann::json corpus_to_json(const FeatureCorpus& corpus);

// Number of papers whose feature set contains `f`. Unknown features give 0.
size_t appearance_count(const FeatureCorpus& corpus, const FeatureId& f);

} // namespace fivec
