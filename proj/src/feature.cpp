#include "fivec/feature.hpp"

#include "fivec/errors.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <fstream>

namespace fivec {

std::string normalize_name(std::string_view raw) {
    size_t begin = 0;
    size_t end = raw.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(raw[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(raw[end - 1]))) --end;
    std::string out;
    out.reserve(end - begin);
    for (size_t i = begin; i < end; ++i) {
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i]))));
    }
    return out;
}

AliasTable AliasTable::builtin() {
    return from_map({{"currentDelinquencyStatus", "currentLoanDelinquencyStatus"}});
}

AliasTable AliasTable::from_map(const std::unordered_map<std::string, std::string>& raw) {
    AliasTable t;
    for (const auto& [variant, canonical] : raw) {
        const std::string v = normalize_name(variant);
        const std::string c = normalize_name(canonical);
        if (v.empty() || c.empty()) throw ValidationError("alias table entries must be non-empty");
        if (v == c) continue;
        t.map_[v] = c;
    }
    // A canonical name must be a fixpoint, otherwise canon(canon(x)) != canon(x).
    for (const auto& [variant, canonical] : t.map_) {
        (void)variant;
        if (t.map_.count(canonical) > 0) {
            throw ValidationError("alias target '" + canonical + "' is itself an alias variant");
        }
    }
    return t;
}

AliasTable AliasTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open alias file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("alias file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw ValidationError("alias file must be a JSON object: " + path);
    std::unordered_map<std::string, std::string> raw;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_string()) throw ValidationError("alias value for '" + k + "' must be a string");
        raw[k] = v.get<std::string>();
    }
    return from_map(raw);
}

FeatureId AliasTable::canon(std::string_view raw) const {
    std::string n = normalize_name(raw);
    if (n.empty()) throw ValidationError("feature name is empty after normalization");
    const auto it = map_.find(n);
    if (it != map_.end()) return FeatureId(it->second);
    return FeatureId(std::move(n));
}

std::vector<std::string> feature_names(const std::vector<FeatureId>& features) {
    std::vector<std::string> out;
    out.reserve(features.size());
    for (const auto& f : features) out.push_back(f.name);
    return out;
}

} // namespace fivec
