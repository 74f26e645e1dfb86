#include "fivec/loans.hpp"

#include "fivec/errors.hpp"
#include "fivec/hash.hpp"
#include "fivec/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

namespace fivec {

std::optional<ColumnKind> SchemaConfig::kind_of(const FeatureId& f) const {
    for (const auto& [name, kind] : columns) {
        if (name == f) return kind;
    }
    return std::nullopt;
}

SchemaConfig SchemaConfig::from_json(const nlohmann::json& doc, const AliasTable& aliases) {
    if (!doc.is_object() || !doc.contains("target") || !doc.contains("columns")) {
        throw ValidationError("schema config must be {target, positive_label, columns}");
    }
    SchemaConfig s;
    s.target = aliases.canon(doc["target"].get<std::string>());
    if (doc.contains("positive_label")) {
        const auto& pl = doc["positive_label"];
        s.positive_label = pl.is_string() ? pl.get<std::string>() : pl.dump();
    } else {
        s.positive_label = "1";
    }
    if (!doc["columns"].is_object()) throw ValidationError("schema 'columns' must be an object");
    for (const auto& [name, kind] : doc["columns"].items()) {
        const std::string k = kind.is_string() ? kind.get<std::string>() : kind.dump();
        ColumnKind ck;
        if (k == "numeric") {
            ck = ColumnKind::Numeric;
        } else if (k == "categorical") {
            ck = ColumnKind::Categorical;
        } else {
            throw ValidationError("unknown column kind '" + k + "' for column '" + name + "'");
        }
        s.columns.emplace_back(aliases.canon(name), ck);
    }
    std::sort(s.columns.begin(), s.columns.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (size_t i = 1; i < s.columns.size(); ++i) {
        if (s.columns[i].first == s.columns[i - 1].first) {
            throw ValidationError("schema lists column '" + s.columns[i].first.name + "' twice");
        }
    }
    return s;
}

SchemaConfig SchemaConfig::load(const std::string& path, const AliasTable& aliases) {
    std::ifstream in(path);
    if (!in) throw IoError("schema config not found: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("schema config " + path + ": " + e.what());
    }
    return from_json(doc, aliases);
}

nlohmann::json SchemaConfig::to_json() const {
    nlohmann::json cols = nlohmann::json::object();
    for (const auto& [name, kind] : columns) {
        cols[name.name] = kind == ColumnKind::Numeric ? "numeric" : "categorical";
    }
    return {{"target", target.name}, {"positive_label", positive_label}, {"columns", cols}};
}

LoanDataset::LoanDataset(std::shared_ptr<const Table> table, std::vector<uint32_t> rows)
    : table_(std::move(table)), rows_(std::move(rows)) {}

std::optional<size_t> LoanDataset::column_index(const FeatureId& f) const {
    for (size_t i = 0; i < table_->columns.size(); ++i) {
        if (table_->columns[i].first == f) return i;
    }
    return std::nullopt;
}

double LoanDataset::numeric_at(size_t col, size_t row) const {
    return table_->numeric[col][rows_[row]];
}

int32_t LoanDataset::categorical_at(size_t col, size_t row) const {
    return table_->categorical[col][rows_[row]];
}

const std::vector<std::string>& LoanDataset::levels_of(size_t col) const {
    return table_->levels[col];
}

int LoanDataset::target_at(size_t row) const { return table_->target[rows_[row]]; }

size_t LoanDataset::positive_count() const {
    size_t n = 0;
    for (size_t r = 0; r < rows_.size(); ++r) n += static_cast<size_t>(target_at(r));
    return n;
}

double LoanDataset::positive_ratio() const {
    if (rows_.empty()) return 0.0;
    return static_cast<double>(positive_count()) / static_cast<double>(rows_.size());
}

uint64_t LoanDataset::row_fingerprint() const {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const uint32_t r : rows_) h = fnv1a64_u64(r, h);
    return h;
}

namespace {

// Minimal CSV reader: comma separated, double quotes escape commas and
// doubled quotes. Loan extracts never need multi-line fields.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cell));
            cell.clear();
        } else if (c != '\r') {
            cell.push_back(c);
        }
    }
    out.push_back(std::move(cell));
    return out;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

} // namespace

LoanDataset load_loans(const std::string& path, const SchemaConfig& schema,
                       const AliasTable& aliases) {
    std::ifstream in(path);
    if (!in) throw IoError("loan data not found: " + path);

    std::string header_line;
    if (!std::getline(in, header_line)) throw ValidationError("loan CSV is empty: " + path);
    const std::vector<std::string> header = split_csv_line(header_line);

    auto table = std::make_shared<LoanDataset::Table>();
    // header position -> dataset column index, or -1 for the target column
    std::vector<int> col_of_header(header.size(), -2);
    int target_header = -1;
    for (size_t h = 0; h < header.size(); ++h) {
        const FeatureId name = aliases.canon(header[h]);
        if (name == schema.target) {
            if (target_header >= 0) throw ValidationError("target column appears twice in header");
            target_header = static_cast<int>(h);
            col_of_header[h] = -1;
            continue;
        }
        const auto kind = schema.kind_of(name);
        if (!kind) {
            throw ValidationError("column '" + header[h] + "' has no kind in the schema config");
        }
        col_of_header[h] = static_cast<int>(table->columns.size());
        table->columns.emplace_back(name, *kind);
        table->numeric.emplace_back();
        table->categorical.emplace_back();
        table->levels.emplace_back();
    }
    if (target_header < 0) {
        throw ValidationError("target column '" + schema.target.name + "' missing from CSV header");
    }

    std::vector<std::unordered_map<std::string, int32_t>> level_codes(table->columns.size());
    std::string line;
    size_t row_number = 1; // header was line 1
    while (std::getline(in, line)) {
        ++row_number;
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw ValidationError("row " + std::to_string(row_number) + " has " +
                                  std::to_string(cells.size()) + " cells, header has " +
                                  std::to_string(header.size()));
        }
        for (size_t h = 0; h < cells.size(); ++h) {
            const int ci = col_of_header[h];
            if (ci == -1) {
                if (cells[h].empty()) {
                    throw ValidationError("row " + std::to_string(row_number) +
                                          ": target cell is empty");
                }
                table->target.push_back(cells[h] == schema.positive_label ? 1 : 0);
                continue;
            }
            const size_t col = static_cast<size_t>(ci);
            if (table->columns[col].second == ColumnKind::Numeric) {
                if (cells[h].empty()) {
                    table->numeric[col].push_back(std::numeric_limits<double>::quiet_NaN());
                } else {
                    try {
                        size_t pos = 0;
                        const double v = std::stod(cells[h], &pos);
                        if (pos != cells[h].size()) throw std::invalid_argument("trailing junk");
                        table->numeric[col].push_back(v);
                    } catch (const std::exception&) {
                        throw ValidationError("row " + std::to_string(row_number) + ", column '" +
                                              table->columns[col].first.name +
                                              "': cannot parse numeric cell '" + cells[h] + "'");
                    }
                }
            } else {
                if (cells[h].empty()) {
                    table->categorical[col].push_back(-1);
                } else {
                    auto& codes = level_codes[col];
                    const auto it = codes.find(cells[h]);
                    if (it != codes.end()) {
                        table->categorical[col].push_back(it->second);
                    } else {
                        const int32_t code = static_cast<int32_t>(table->levels[col].size());
                        table->levels[col].push_back(cells[h]);
                        codes.emplace(cells[h], code);
                        table->categorical[col].push_back(code);
                    }
                }
            }
        }
    }
    if (table->target.empty()) throw ValidationError("loan CSV has a header but no rows: " + path);

    std::vector<uint32_t> rows(table->target.size());
    for (size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<uint32_t>(i);
    return LoanDataset(std::move(table), std::move(rows));
}

void save_loans_csv(const LoanDataset& ds, const SchemaConfig& schema, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write loan CSV: " + path);
    const auto& cols = ds.columns();
    for (size_t c = 0; c < cols.size(); ++c) out << csv_escape(cols[c].first.name) << ',';
    out << csv_escape(schema.target.name) << '\n';

    char buf[64];
    for (size_t r = 0; r < ds.row_count(); ++r) {
        for (size_t c = 0; c < cols.size(); ++c) {
            if (cols[c].second == ColumnKind::Numeric) {
                const double v = ds.numeric_at(c, r);
                if (!std::isnan(v)) {
                    std::snprintf(buf, sizeof(buf), "%.10g", v);
                    out << buf;
                }
            } else {
                const int32_t code = ds.categorical_at(c, r);
                if (code >= 0) out << csv_escape(ds.levels_of(c)[static_cast<size_t>(code)]);
            }
            out << ',';
        }
        out << (ds.target_at(r) ? schema.positive_label : "0") << '\n';
    }
    if (!out) throw IoError("failed while writing loan CSV: " + path);
}

SplitResult stratified_split(const LoanDataset& ds, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw ArgumentError("train_fraction must lie in (0, 1)");
    }
    std::vector<uint32_t> negatives;
    std::vector<uint32_t> positives;
    for (size_t r = 0; r < ds.row_count(); ++r) {
        (ds.target_at(r) ? positives : negatives).push_back(ds.row_indices()[r]);
    }
    if (negatives.size() < 2 || positives.size() < 2) {
        throw ArgumentError("stratified split needs at least 2 rows per class (got " +
                            std::to_string(negatives.size()) + " negatives, " +
                            std::to_string(positives.size()) + " positives)");
    }

    SplitResult out{LoanDataset(ds.table(), {}), LoanDataset(ds.table(), {}), {}};
    std::vector<uint32_t> train_rows;
    std::vector<uint32_t> test_rows;
    Rng rng(spec.seed);
    for (auto* cls : {&negatives, &positives}) {
        rng.shuffle(*cls);
        // round half up
        const size_t n_train = static_cast<size_t>(
            std::floor(spec.train_fraction * static_cast<double>(cls->size()) + 0.5));
        train_rows.insert(train_rows.end(), cls->begin(), cls->begin() + static_cast<long>(n_train));
        test_rows.insert(test_rows.end(), cls->begin() + static_cast<long>(n_train), cls->end());
        if (n_train == 0 || n_train == cls->size()) {
            out.warnings.push_back(std::string("class ") + (cls == &positives ? "1" : "0") +
                                   " has an empty " + (n_train == 0 ? "train" : "test") +
                                   " partition under the rounding rule");
        }
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    out.train = LoanDataset(ds.table(), std::move(train_rows));
    out.test = LoanDataset(ds.table(), std::move(test_rows));
    return out;
}

} // namespace fivec
