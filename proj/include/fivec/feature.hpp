#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fivec {

// Canonical feature identifier: trimmed, ASCII-lowercased, alias-resolved.
// Construct through AliasTable::canon when the text comes from outside.
struct FeatureId {
    std::string name;

    FeatureId() = default;
    explicit FeatureId(std::string n) : name(std::move(n)) {}

    auto operator<=>(const FeatureId&) const = default;
};

struct FeatureIdHash {
    size_t operator()(const FeatureId& f) const { return std::hash<std::string>{}(f.name); }
};

// Trim + ASCII lowercase. Idempotent.
std::string normalize_name(std::string_view raw);

// Maps variant spellings of a feature to one canonical id. The literature
// tables drift between spellings of the same field
// ("currentDelinquencyStatus" vs "currentLoanDelinquencyStatus"); without
// one canonical id the concept filter would silently miss matches.
class AliasTable {
public:
    // Aliases for the naming drift present in the bundled tables.
    static AliasTable builtin();

    // JSON object {variant: canonical}. Both sides are normalized; a
    // canonical name that is itself listed as a variant is rejected so that
    // canon() stays idempotent.
    static AliasTable load(const std::string& path);
    static AliasTable from_map(const std::unordered_map<std::string, std::string>& raw);

    FeatureId canon(std::string_view raw) const;

    size_t size() const { return map_.size(); }

private:
    std::unordered_map<std::string, std::string> map_;
};

std::vector<std::string> feature_names(const std::vector<FeatureId>& features);

} // namespace fivec
