#pragma once

#include "fivec/feature.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fivec {

enum class ColumnKind { Numeric, Categorical };

struct SchemaConfig {
    FeatureId target;
    std::string positive_label; // raw cell text marking a default
    std::vector<std::pair<FeatureId, ColumnKind>> columns;

    std::optional<ColumnKind> kind_of(const FeatureId& f) const;

    // {"target": name, "positive_label": text, "columns": {name: "numeric"|"categorical"}}
    static SchemaConfig load(const std::string& path, const AliasTable& aliases);
    static SchemaConfig from_json(const nlohmann::json& doc, const AliasTable& aliases);
    nlohmann::json to_json() const;
};

// Columnar loan records plus a binary default target. The table itself is
// immutable and shared; a LoanDataset is a row view onto it, so splits hand
// out two sub-views without copying cell data.
class LoanDataset {
public:
    struct Table {
        std::vector<std::pair<FeatureId, ColumnKind>> columns;
        // Per column index, exactly one of these is populated.
        std::vector<std::vector<double>> numeric;      // NaN = missing
        std::vector<std::vector<int32_t>> categorical; // -1 = missing
        std::vector<std::vector<std::string>> levels;  // categorical dictionaries
        std::vector<uint8_t> target;                   // 1 = default
    };

    LoanDataset(std::shared_ptr<const Table> table, std::vector<uint32_t> rows);

    size_t row_count() const { return rows_.size(); }
    size_t column_count() const { return table_->columns.size(); }
    const std::vector<std::pair<FeatureId, ColumnKind>>& columns() const { return table_->columns; }
    std::optional<size_t> column_index(const FeatureId& f) const;

    // Cell accessors; `row` is a view-relative index.
    double numeric_at(size_t col, size_t row) const;
    int32_t categorical_at(size_t col, size_t row) const;
    const std::vector<std::string>& levels_of(size_t col) const;
    int target_at(size_t row) const;

    size_t positive_count() const;
    double positive_ratio() const;

    // Stable identity of the underlying rows in this view (FNV over the
    // original row indices); equal across runs for the same split inputs.
    uint64_t row_fingerprint() const;
    const std::vector<uint32_t>& row_indices() const { return rows_; }
    std::shared_ptr<const Table> table() const { return table_; }

private:
    std::shared_ptr<const Table> table_;
    std::vector<uint32_t> rows_; // indices into the table, ascending per view
};

// CSV ingest. The header must consist of schema columns plus the target
// column; cells parse per column kind; empty cells are missing markers.
LoanDataset load_loans(const std::string& path, const SchemaConfig& schema,
                       const AliasTable& aliases);

// Writes the view back out as CSV (used by the synthetic generator CLI).
// Deterministic formatting: numerics via "%.10g", missing as empty cells.
void save_loans_csv(const LoanDataset& ds, const SchemaConfig& schema, const std::string& path);

struct SplitSpec {
    double train_fraction = 0.7;
    uint64_t seed = 0;
};

struct SplitResult {
    LoanDataset train;
    LoanDataset test;
    std::vector<std::string> warnings;
};

// Stratified partition: per class, round-half-up(train_fraction * count)
// rows go to train via a seeded shuffle, the remainder to test.
SplitResult stratified_split(const LoanDataset& ds, const SplitSpec& spec);

// Random-forest impurity ranking; returns the top `keep` features in rank
// order. Trains on the 70% stratified train portion derived from `seed`.
std::vector<FeatureId> select_features(const LoanDataset& ds, size_t keep, uint64_t seed);

} // namespace fivec
