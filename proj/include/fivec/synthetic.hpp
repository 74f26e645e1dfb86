#pragma once

#include "fivec/loans.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace fivec {

// Desk-scale stand-in for the restricted loan-level download. Labels are
// assigned first (exactly round-half-up(rows * positive_ratio) defaults),
// then feature values are drawn class-conditionally: signal features shift
// their distribution between classes, everything else is label-independent.
// With equal-variance Gaussian signals the true default probability is a
// logistic function of the signal features, so learnability is known.
struct GeneratorConfig {
    size_t rows = 1000;
    double positive_ratio = 0.02;
    std::vector<FeatureId> signal_features;
    double signal_strength = 2.0; // class mean separation in units of sigma
    size_t noise_features = 0;    // extra numeric columns with no signal

    static GeneratorConfig load(const std::string& path, const AliasTable& aliases);
    static GeneratorConfig from_json(const nlohmann::json& doc, const AliasTable& aliases);
    nlohmann::json to_json() const;
};

// The default synthetic schema: the mortgage features of the bundled corpus
// tables plus any configured noise columns, with a "default" target.
SchemaConfig synthetic_schema(const GeneratorConfig& config);

LoanDataset generate_synthetic(const GeneratorConfig& config, uint64_t seed);

} // namespace fivec
