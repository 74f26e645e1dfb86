#pragma once

#include "fivec/miner.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fivec {

// The 5 C's of credit, the domain concept layer the feature sets must cover.
enum class Concept { Character, Capacity, Capital, Conditions, Collateral };

inline constexpr std::array<Concept, 5> kAllConcepts = {
    Concept::Character, Concept::Capacity, Concept::Capital, Concept::Conditions,
    Concept::Collateral};

const char* concept_name(Concept c);
std::optional<Concept> concept_from_name(const std::string& name);

// Concept -> feature membership. Every concept maps to at least one feature
// and a feature belongs to at most one concept.
class ConceptMap {
public:
    explicit ConceptMap(std::map<Concept, std::vector<FeatureId>> mapping);

    const std::vector<FeatureId>& features_of(Concept c) const;
    std::optional<Concept> concept_of(const FeatureId& f) const;
    const std::map<Concept, std::vector<FeatureId>>& mapping() const { return mapping_; }

    // File format: {"Character": [...], "Capacity": [...], "Capital": [...],
    // "Conditions": [...], "Collateral": [...]}.
    static ConceptMap load(const std::string& path, const AliasTable& aliases);
    static ConceptMap from_json(const nlohmann::json& doc, const AliasTable& aliases);
    nlohmann::json to_json() const;

private:
    std::map<Concept, std::vector<FeatureId>> mapping_; // values sorted
};

// The bundled default mapping:
//   Character   creditScore, creditScoreOriginal, creditScoreCoborrower
//   Capacity    debtToIncomeRatioOriginal, currentLoanDelinquencyStatus
//   Capital     UPBactual, UPBoriginal
//   Conditions  propertyState, interestRateCurrent, interestRateOriginal, postalCode
//   Collateral  LTV, LTVoriginal, CLTV, CLTVoriginal
ConceptMap default_concept_map();

struct CoverageBreakdown {
    bool covers_all = false;
    std::map<Concept, std::vector<FeatureId>> members; // only covered concepts listed
    std::vector<FeatureId> unmapped;
};

// True iff every concept has at least one member inside `features`. Features
// outside the map never cause rejection; they are reported as unmapped.
CoverageBreakdown covers_all_concepts(const std::vector<FeatureId>& features,
                                      const ConceptMap& map);

// A length-8 frequent set certified to touch all 5 C's.
struct GeneralizedFeatureSet {
    std::vector<FeatureId> features; // sorted, exactly kGeneralizedSetLen
    Rational support;
    CoverageBreakdown coverage;
};

inline constexpr int kGeneralizedSetLen = 8;

// Keeps the itemsets passing covers_all_concepts, order preserved. Inputs
// must all have length kGeneralizedSetLen (apply filter_by_length first).
std::vector<GeneralizedFeatureSet> generalize(const std::vector<ItemSet>& itemsets,
                                              const ConceptMap& map);

nlohmann::json generalized_set_to_json(const GeneralizedFeatureSet& set);
GeneralizedFeatureSet generalized_set_from_json(const nlohmann::json& doc,
                                                const AliasTable& aliases);

} // namespace fivec
