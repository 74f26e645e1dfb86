#include "fivec/concepts.hpp"

#include "fivec/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>

namespace fivec {

const char* concept_name(Concept c) {
    switch (c) {
        case Concept::Character: return "Character";
        case Concept::Capacity: return "Capacity";
        case Concept::Capital: return "Capital";
        case Concept::Conditions: return "Conditions";
        case Concept::Collateral: return "Collateral";
    }
    return "?";
}

std::optional<Concept> concept_from_name(const std::string& name) {
    for (const Concept c : kAllConcepts) {
        if (name == concept_name(c)) return c;
    }
    return std::nullopt;
}

ConceptMap::ConceptMap(std::map<Concept, std::vector<FeatureId>> mapping)
    : mapping_(std::move(mapping)) {
    for (const Concept c : kAllConcepts) {
        const auto it = mapping_.find(c);
        if (it == mapping_.end() || it->second.empty()) {
            throw ValidationError(std::string("concept map: concept '") + concept_name(c) +
                                  "' has no features");
        }
    }
    std::map<FeatureId, Concept> owner;
    for (auto& [c, fs] : mapping_) {
        std::sort(fs.begin(), fs.end());
        fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
        for (const auto& f : fs) {
            const auto [it, inserted] = owner.emplace(f, c);
            if (!inserted) {
                throw ValidationError("concept map: feature '" + f.name + "' appears under both '" +
                                      concept_name(it->second) + "' and '" + concept_name(c) + "'");
            }
        }
    }
}

const std::vector<FeatureId>& ConceptMap::features_of(Concept c) const {
    return mapping_.at(c);
}

std::optional<Concept> ConceptMap::concept_of(const FeatureId& f) const {
    for (const auto& [c, fs] : mapping_) {
        if (std::binary_search(fs.begin(), fs.end(), f)) return c;
    }
    return std::nullopt;
}

ConceptMap ConceptMap::from_json(const nlohmann::json& doc, const AliasTable& aliases) {
    if (!doc.is_object()) throw ValidationError("concept map must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (!concept_from_name(key)) {
            throw ValidationError("concept map has unknown concept key '" + key + "'");
        }
    }
    std::map<Concept, std::vector<FeatureId>> mapping;
    for (const Concept c : kAllConcepts) {
        const char* key = concept_name(c);
        if (!doc.contains(key)) {
            throw ValidationError(std::string("concept map is missing concept key '") + key + "'");
        }
        if (!doc[key].is_array()) {
            throw ValidationError(std::string("concept map entry '") + key + "' must be an array");
        }
        std::vector<FeatureId> fs;
        for (const auto& f : doc[key]) {
            if (!f.is_string()) {
                throw ValidationError(std::string("concept map entry '") + key +
                                      "' has a non-string feature");
            }
            fs.push_back(aliases.canon(f.get<std::string>()));
        }
        mapping.emplace(c, std::move(fs));
    }
    return ConceptMap(std::move(mapping));
}

ConceptMap ConceptMap::load(const std::string& path, const AliasTable& aliases) {
    std::ifstream in(path);
    if (!in) throw IoError("concept map not found: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("concept map " + path + ": " + e.what());
    }
    return from_json(doc, aliases);
}

nlohmann::json ConceptMap::to_json() const {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [c, fs] : mapping_) obj[concept_name(c)] = feature_names(fs);
    return obj;
}

ConceptMap default_concept_map() {
    const AliasTable aliases = AliasTable::builtin();
    const auto canon_all = [&](std::initializer_list<const char*> names) {
        std::vector<FeatureId> out;
        for (const char* n : names) out.push_back(aliases.canon(n));
        return out;
    };
    std::map<Concept, std::vector<FeatureId>> m;
    m[Concept::Character] = canon_all({"creditScore", "creditScoreOriginal", "creditScoreCoborrower"});
    m[Concept::Capacity] = canon_all({"debtToIncomeRatioOriginal", "currentDelinquencyStatus"});
    m[Concept::Capital] = canon_all({"UPBactual", "UPBoriginal"});
    m[Concept::Conditions] =
        canon_all({"propertyState", "interestRateCurrent", "interestRateOriginal", "postalCode"});
    m[Concept::Collateral] = canon_all({"LTV", "LTVoriginal", "CLTV", "CLTVoriginal"});
    return ConceptMap(std::move(m));
}

CoverageBreakdown covers_all_concepts(const std::vector<FeatureId>& features,
                                      const ConceptMap& map) {
    CoverageBreakdown out;
    for (const auto& f : features) {
        if (const auto c = map.concept_of(f)) {
            out.members[*c].push_back(f);
        } else {
            out.unmapped.push_back(f);
        }
    }
    for (auto& [c, fs] : out.members) {
        (void)c;
        std::sort(fs.begin(), fs.end());
    }
    std::sort(out.unmapped.begin(), out.unmapped.end());
    out.covers_all = true;
    for (const Concept c : kAllConcepts) {
        if (out.members.find(c) == out.members.end()) {
            out.covers_all = false;
            break;
        }
    }
    return out;
}

std::vector<GeneralizedFeatureSet> generalize(const std::vector<ItemSet>& itemsets,
                                              const ConceptMap& map) {
    for (const auto& s : itemsets) {
        if (static_cast<int>(s.features.size()) != kGeneralizedSetLen) {
            throw ArgumentError("generalize expects itemsets of length " +
                                std::to_string(kGeneralizedSetLen) + ", got one of length " +
                                std::to_string(s.features.size()));
        }
    }
    std::vector<GeneralizedFeatureSet> out;
    for (const auto& s : itemsets) {
        CoverageBreakdown coverage = covers_all_concepts(s.features, map);
        if (!coverage.covers_all) continue;
        GeneralizedFeatureSet g;
        g.features = s.features;
        g.support = s.support();
        g.coverage = std::move(coverage);
        out.push_back(std::move(g));
    }
    return out;
}

nlohmann::json generalized_set_to_json(const GeneralizedFeatureSet& set) {
    nlohmann::json coverage = nlohmann::json::object();
    for (const auto& [c, fs] : set.coverage.members) coverage[concept_name(c)] = feature_names(fs);
    return {{"features", feature_names(set.features)},
            {"support", {{"num", set.support.num}, {"den", set.support.den}}},
            {"coverage", coverage},
            {"unmapped", feature_names(set.coverage.unmapped)}};
}

GeneralizedFeatureSet generalized_set_from_json(const nlohmann::json& doc,
                                                const AliasTable& aliases) {
    if (!doc.is_object() || !doc.contains("features") || !doc.contains("support")) {
        throw ValidationError("generalized set must be {features, support, coverage, unmapped}");
    }
    GeneralizedFeatureSet g;
    for (const auto& f : doc["features"]) g.features.push_back(aliases.canon(f.get<std::string>()));
    std::sort(g.features.begin(), g.features.end());
    g.support = Rational{doc["support"].value("num", 0LL), doc["support"].value("den", 1LL)};
    if (doc.contains("coverage")) {
        for (const auto& [key, fs] : doc["coverage"].items()) {
            const auto c = concept_from_name(key);
            if (!c) throw ValidationError("generalized set coverage has unknown concept '" + key + "'");
            for (const auto& f : fs) {
                g.coverage.members[*c].push_back(aliases.canon(f.get<std::string>()));
            }
        }
    }
    if (doc.contains("unmapped")) {
        for (const auto& f : doc["unmapped"]) {
            g.coverage.unmapped.push_back(aliases.canon(f.get<std::string>()));
        }
    }
    g.coverage.covers_all = true;
    for (const Concept c : kAllConcepts) {
        if (g.coverage.members.find(c) == g.coverage.members.end()) g.coverage.covers_all = false;
    }
    return g;
}

} // namespace fivec
