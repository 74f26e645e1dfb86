#include "fivec/corpus.hpp"

#include "fivec/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <unordered_set>

namespace fivec {

FeatureCorpus::FeatureCorpus(std::vector<PaperRecord> papers) : papers_(std::move(papers)) {
    if (papers_.empty()) throw ValidationError("corpus has no paper records");
    std::unordered_set<std::string> seen_ids;
    std::unordered_set<FeatureId, FeatureIdHash> universe;
    for (auto& p : papers_) {
        if (p.paper_id.empty()) throw ValidationError("corpus contains a paper with an empty id");
        if (!seen_ids.insert(p.paper_id).second) {
            throw ValidationError("duplicate paper_id '" + p.paper_id + "'");
        }
        std::sort(p.features.begin(), p.features.end());
        p.features.erase(std::unique(p.features.begin(), p.features.end()), p.features.end());
        if (p.features.empty()) {
            throw ValidationError("paper '" + p.paper_id + "' has an empty feature set");
        }
        universe.insert(p.features.begin(), p.features.end());
    }
    universe_.assign(universe.begin(), universe.end());
    std::sort(universe_.begin(), universe_.end());
}

bool FeatureCorpus::paper_contains(size_t paper_index, const FeatureId& f) const {
    const auto& fs = papers_[paper_index].features;
    return std::binary_search(fs.begin(), fs.end(), f);
}

FeatureCorpus parse_corpus(const nlohmann::json& doc, const AliasTable& aliases) {
    if (!doc.is_array()) throw ValidationError("corpus file must be a top-level JSON array");
    std::vector<PaperRecord> papers;
    papers.reserve(doc.size());
    for (size_t i = 0; i < doc.size(); ++i) {
        const auto& rec = doc[i];
        const std::string where = "corpus record " + std::to_string(i);
        if (!rec.is_object()) throw ValidationError(where + " is not an object");
        if (!rec.contains("paper_id") || !rec["paper_id"].is_string()) {
            throw ValidationError(where + " is missing a string 'paper_id'");
        }
        if (!rec.contains("features") || !rec["features"].is_array()) {
            throw ValidationError(where + " is missing a 'features' array");
        }
        PaperRecord p;
        p.paper_id = rec["paper_id"].get<std::string>();
        for (const auto& f : rec["features"]) {
            if (!f.is_string()) {
                throw ValidationError(where + " ('" + p.paper_id + "') has a non-string feature");
            }
            p.features.push_back(aliases.canon(f.get<std::string>()));
        }
        papers.push_back(std::move(p));
    }
    return FeatureCorpus(std::move(papers));
}

FeatureCorpus load_corpus(const std::string& path, const AliasTable& aliases) {
    std::ifstream in(path);
    if (!in) throw IoError("corpus not found: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("corpus file " + path + ": " + e.what());
    }
    return parse_corpus(doc, aliases);
}

nlohmann::json corpus_to_json(const FeatureCorpus& corpus) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : corpus.papers()) {
        arr.push_back({{"paper_id", p.paper_id}, {"features", feature_names(p.features)}});
    }
    return arr;
}

size_t appearance_count(const FeatureCorpus& corpus, const FeatureId& f) {
    size_t n = 0;
    for (size_t i = 0; i < corpus.paper_count(); ++i) {
        if (corpus.paper_contains(i, f)) ++n;
    }
    return n;
}

} // namespace fivec
