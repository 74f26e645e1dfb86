#include "fivec/synthetic.hpp"

#include "fivec/errors.hpp"
#include "fivec/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace fivec {

namespace {

struct DefaultColumn {
    const char* name;
    ColumnKind kind;
};

// The features recurring across the mortgage-default literature, plus the
// handful that show up in the mined length-8 sets. Postal/state/type/flag
// columns are categorical, the rest numeric.
constexpr DefaultColumn kDefaultColumns[] = {
    {"creditScore", ColumnKind::Numeric},
    {"LTV", ColumnKind::Numeric},
    {"LTVoriginal", ColumnKind::Numeric},
    {"creditScoreOriginal", ColumnKind::Numeric},
    {"interestRateOriginal", ColumnKind::Numeric},
    {"interestRateCurrent", ColumnKind::Numeric},
    {"CLTVoriginal", ColumnKind::Numeric},
    {"propertyState", ColumnKind::Categorical},
    {"UPBoriginal", ColumnKind::Numeric},
    {"postalCode", ColumnKind::Categorical},
    {"DebtToIncomeRatioOriginal", ColumnKind::Numeric},
    {"loanAge", ColumnKind::Numeric},
    {"CLTV", ColumnKind::Numeric},
    {"numberOfBorrowers", ColumnKind::Numeric},
    {"UPBactual", ColumnKind::Numeric},
    {"currentLoanDelinquencyStatus", ColumnKind::Numeric},
    {"numberOfUnits", ColumnKind::Numeric},
    {"propertyType", ColumnKind::Categorical},
    {"loanTermOriginal", ColumnKind::Numeric},
    {"productType", ColumnKind::Categorical},
    {"prepaymentPenaltyMortgageFlag", ColumnKind::Categorical},
};

std::vector<std::string> levels_for(const std::string& name) {
    if (name == "propertystate") return {"CA", "FL", "NY", "TX", "WA"};
    if (name == "postalcode") return {"065", "123", "334", "480", "902"};
    if (name == "propertytype") return {"CO", "MH", "PU", "SF"};
    if (name == "producttype") return {"ARM", "FRM"};
    if (name == "prepaymentpenaltymortgageflag") return {"N", "Y"};
    return {"a", "b", "c"};
}

} // namespace

GeneratorConfig GeneratorConfig::load(const std::string& path, const AliasTable& aliases) {
    std::ifstream in(path);
    if (!in) throw IoError("generator config not found: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("generator config " + path + ": " + e.what());
    }
    return from_json(doc, aliases);
}

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& doc, const AliasTable& aliases) {
    if (!doc.is_object()) throw ParseError("generator config must be a JSON object");
    GeneratorConfig config;
    try {
        if (doc.contains("rows")) config.rows = doc.at("rows").get<size_t>();
        if (doc.contains("positive_ratio")) config.positive_ratio = doc.at("positive_ratio").get<double>();
        if (doc.contains("signal_strength")) config.signal_strength = doc.at("signal_strength").get<double>();
        if (doc.contains("noise_features")) config.noise_features = doc.at("noise_features").get<size_t>();
        if (doc.contains("signal_features")) {
            for (const auto& item : doc.at("signal_features")) {
                config.signal_features.push_back(aliases.canon(item.get<std::string>()));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("generator config: ") + e.what());
    }
    if (config.signal_features.empty()) {
        for (const char* name : {"creditScore", "CLTVoriginal", "UPBactual", "interestRateCurrent"}) {
            config.signal_features.push_back(aliases.canon(name));
        }
    }
    std::sort(config.signal_features.begin(), config.signal_features.end());
    config.signal_features.erase(
        std::unique(config.signal_features.begin(), config.signal_features.end()),
        config.signal_features.end());
    return config;
}

nlohmann::json GeneratorConfig::to_json() const {
    return nlohmann::json{{"rows", rows},
                          {"positive_ratio", positive_ratio},
                          {"signal_features", feature_names(signal_features)},
                          {"signal_strength", signal_strength},
                          {"noise_features", noise_features}};
}

SchemaConfig synthetic_schema(const GeneratorConfig& config) {
    const AliasTable aliases = AliasTable::builtin();
    SchemaConfig schema;
    schema.target = FeatureId{"default"};
    schema.positive_label = "1";
    for (const auto& col : kDefaultColumns) {
        schema.columns.emplace_back(aliases.canon(col.name), col.kind);
    }
    for (size_t i = 0; i < config.noise_features; ++i) {
        schema.columns.emplace_back(FeatureId{"noise" + std::to_string(i + 1)},
                                    ColumnKind::Numeric);
    }
    std::sort(schema.columns.begin(), schema.columns.end());
    return schema;
}

LoanDataset generate_synthetic(const GeneratorConfig& config, uint64_t seed) {
    if (!(config.positive_ratio > 0.0 && config.positive_ratio < 1.0)) {
        throw ArgumentError("positive_ratio must lie strictly inside (0, 1), got " +
                            std::to_string(config.positive_ratio));
    }
    if (config.rows == 0) throw ArgumentError("row count must be positive");
    if (!(config.signal_strength > 0.0) || !std::isfinite(config.signal_strength)) {
        throw ArgumentError("signal_strength must be positive and finite");
    }

    const auto n = config.rows;
    const auto positives = static_cast<size_t>(
        std::floor(config.positive_ratio * static_cast<double>(n) + 0.5));
    if (positives == 0) {
        throw ArgumentError("positive_ratio " + std::to_string(config.positive_ratio) +
                            " rounds to zero positive rows at " + std::to_string(n) + " rows");
    }
    if (positives == n) {
        throw ArgumentError("positive_ratio " + std::to_string(config.positive_ratio) +
                            " rounds to zero negative rows at " + std::to_string(n) + " rows");
    }

    const SchemaConfig schema = synthetic_schema(config);
    for (const auto& f : config.signal_features) {
        const auto kind = schema.kind_of(f);
        if (!kind) throw ArgumentError("signal feature not in the synthetic schema: " + f.name);
        if (*kind != ColumnKind::Numeric) {
            throw ArgumentError("signal feature must be numeric: " + f.name);
        }
    }

    // Labels first: exactly `positives` ones, placement shuffled.
    auto table = std::make_shared<LoanDataset::Table>();
    table->columns = schema.columns;
    table->target.assign(n, 0);
    std::fill(table->target.begin(), table->target.begin() + static_cast<long>(positives), 1);
    Rng label_rng(mix_seed(seed, 0));
    label_rng.shuffle(table->target);

    // Then features, one independent stream per column. Numeric signal
    // columns shift their mean by +/- strength/2 with the class; with unit
    // variance that makes the posterior P(default|x) exactly
    // sigmoid(log(p/(1-p)) + strength * sum of signal values).
    const size_t cols = table->columns.size();
    table->numeric.resize(cols);
    table->categorical.resize(cols);
    table->levels.resize(cols);
    const double half = config.signal_strength / 2.0;
    for (size_t c = 0; c < cols; ++c) {
        const auto& [feature, kind] = table->columns[c];
        Rng rng(mix_seed(seed, 1 + c));
        if (kind == ColumnKind::Numeric) {
            const bool signal = std::binary_search(config.signal_features.begin(),
                                                   config.signal_features.end(), feature);
            auto& col = table->numeric[c];
            col.resize(n);
            for (size_t r = 0; r < n; ++r) {
                const double mean = signal ? (table->target[r] ? half : -half) : 0.0;
                col[r] = mean + rng.next_normal();
            }
        } else {
            table->levels[c] = levels_for(feature.name);
            auto& col = table->categorical[c];
            col.resize(n);
            const auto k = table->levels[c].size();
            for (size_t r = 0; r < n; ++r) {
                col[r] = static_cast<int32_t>(rng.next_below(k));
            }
        }
    }

    std::vector<uint32_t> rows(n);
    for (size_t r = 0; r < n; ++r) rows[r] = static_cast<uint32_t>(r);
    return LoanDataset(std::move(table), std::move(rows));
}

} // namespace fivec
