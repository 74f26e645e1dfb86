#pragma once

#include "fivec/loans.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace fivec {

// How raw columns become model inputs. Tree learners take one column per
// feature (category codes kept as codes); gradient learners take one-hot
// categoricals and z-scored numerics. All statistics come from the training
// view only.
enum class EncodingMode { Tree, Gradient };

std::string encoding_mode_name(EncodingMode mode);
EncodingMode encoding_mode_from_name(const std::string& name);

// One raw cell, independent of any table's category dictionary. Numeric
// features use `num` (NaN = missing); categoricals use `cat` (empty =
// missing). A RawRow is parallel to Encoder::features().
struct RawValue {
    double num = 0.0;
    std::string cat;
};
using RawRow = std::vector<RawValue>;

// Dense row-major design matrix plus provenance: which source feature each
// encoded column came from.
struct EncodedMatrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> values; // rows x cols
    std::vector<uint8_t> labels;
    std::vector<std::string> col_names;
    std::vector<size_t> col_feature;         // encoded column -> source feature index
    std::vector<uint8_t> col_is_categorical; // tree mode: column holds category codes
    std::vector<FeatureId> source_features;  // indexed by col_feature values

    double at(size_t r, size_t c) const { return values[r * cols + c]; }
    double* row(size_t r) { return values.data() + r * cols; }
    const double* row(size_t r) const { return values.data() + r * cols; }
};

class Encoder {
public:
    struct FeatureStats {
        FeatureId feature;
        ColumnKind kind = ColumnKind::Numeric;
        double median = 0.0; // numeric impute value
        double mean = 0.0;
        double stddev = 1.0;
        std::vector<std::string> levels; // train levels + trailing "MISSING"
        std::string mode_level;          // most frequent train level (reference value)
    };

    // Fits on the listed features only (the run's column subset), in the
    // order given; every feature must exist in the training schema. The
    // overload without a list uses every schema column.
    static Encoder fit(const LoanDataset& train, EncodingMode mode,
                       const std::vector<FeatureId>& features);
    static Encoder fit(const LoanDataset& train, EncodingMode mode);

    EncodingMode mode() const { return mode_; }
    const std::vector<FeatureStats>& features() const { return features_; }
    size_t encoded_width() const { return width_; }
    const std::vector<std::string>& column_names() const { return col_names_; }

    EncodedMatrix transform(const LoanDataset& ds) const;

    // Raw-cell path used by the explainer to encode rows whose values mix
    // two sources (instance vs. reference). Columns are resolved by feature
    // name, so `ds` may carry extra columns or a different column order.
    RawRow raw_row(const LoanDataset& ds, size_t row) const;
    std::vector<double> encode_row(const RawRow& row) const;

    // Reference input: train median for numerics, most frequent train level
    // for categoricals (ties broken by lexicographically smaller level).
    RawRow reference_row() const;

    nlohmann::json to_json() const;
    static Encoder from_json(const nlohmann::json& doc);

private:
    EncodingMode mode_ = EncodingMode::Tree;
    std::vector<FeatureStats> features_;
    size_t width_ = 0;

    void finish(); // derive width + column layout from features_
    std::vector<size_t> column_map(const LoanDataset& ds) const;
    RawRow raw_row_mapped(const LoanDataset& ds, size_t row,
                          const std::vector<size_t>& colmap) const;

    std::vector<std::string> col_names_;
    std::vector<size_t> col_feature_;
    std::vector<uint8_t> col_is_categorical_;
};

} // namespace fivec
