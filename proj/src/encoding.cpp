#include "fivec/encoding.hpp"

#include "fivec/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace fivec {

namespace {

constexpr const char* kMissingLevel = "MISSING";

double median_of(std::vector<double>& v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

std::string encoding_mode_name(EncodingMode mode) {
    return mode == EncodingMode::Tree ? "tree" : "gradient";
}

EncodingMode encoding_mode_from_name(const std::string& name) {
    if (name == "tree") return EncodingMode::Tree;
    if (name == "gradient") return EncodingMode::Gradient;
    throw ParseError("unknown encoding mode: " + name);
}

Encoder Encoder::fit(const LoanDataset& train, EncodingMode mode) {
    std::vector<FeatureId> all;
    for (const auto& [feature, kind] : train.columns()) all.push_back(feature);
    return fit(train, mode, all);
}

Encoder Encoder::fit(const LoanDataset& train, EncodingMode mode,
                     const std::vector<FeatureId>& features) {
    if (train.row_count() == 0) throw ArgumentError("cannot fit an encoder on an empty dataset");
    if (features.empty()) throw ArgumentError("encoder needs at least one feature");
    Encoder enc;
    enc.mode_ = mode;
    const size_t n = train.row_count();
    for (const auto& feature : features) {
        const auto col = train.column_index(feature);
        if (!col) throw ArgumentError("feature not in the dataset schema: " + feature.name);
        const size_t c = *col;
        FeatureStats fs;
        fs.feature = feature;
        fs.kind = train.columns()[c].second;
        if (fs.kind == ColumnKind::Numeric) {
            std::vector<double> present;
            present.reserve(n);
            for (size_t r = 0; r < n; ++r) {
                const double x = train.numeric_at(c, r);
                if (!std::isnan(x)) present.push_back(x);
            }
            if (!present.empty()) {
                double sum = 0.0;
                for (double x : present) sum += x;
                fs.mean = sum / static_cast<double>(present.size());
                double ss = 0.0;
                for (double x : present) ss += (x - fs.mean) * (x - fs.mean);
                fs.stddev = std::sqrt(ss / static_cast<double>(present.size()));
            }
            if (fs.stddev == 0.0) fs.stddev = 1.0;
            fs.median = median_of(present);
        } else {
            const auto& dict = train.levels_of(c);
            std::vector<size_t> counts(dict.size(), 0);
            size_t missing = 0;
            for (size_t r = 0; r < n; ++r) {
                const int32_t code = train.categorical_at(c, r);
                if (code < 0) {
                    ++missing;
                } else {
                    ++counts[static_cast<size_t>(code)];
                }
            }
            // The train dictionary in lexicographic order, then MISSING.
            std::map<std::string, size_t> by_level;
            for (size_t i = 0; i < dict.size(); ++i) by_level[dict[i]] = counts[i];
            size_t best = missing;
            fs.mode_level = kMissingLevel;
            for (const auto& [level, count] : by_level) {
                fs.levels.push_back(level);
                if (count > best) {
                    best = count;
                    fs.mode_level = level;
                }
            }
            fs.levels.push_back(kMissingLevel);
        }
        enc.features_.push_back(std::move(fs));
    }
    enc.finish();
    return enc;
}

void Encoder::finish() {
    col_names_.clear();
    col_feature_.clear();
    col_is_categorical_.clear();
    for (size_t f = 0; f < features_.size(); ++f) {
        const auto& fs = features_[f];
        if (fs.kind == ColumnKind::Numeric || mode_ == EncodingMode::Tree) {
            col_names_.push_back(fs.feature.name);
            col_feature_.push_back(f);
            col_is_categorical_.push_back(fs.kind == ColumnKind::Categorical ? 1 : 0);
        } else {
            for (const auto& level : fs.levels) {
                col_names_.push_back(fs.feature.name + "=" + level);
                col_feature_.push_back(f);
                col_is_categorical_.push_back(0);
            }
        }
    }
    width_ = col_names_.size();
}

std::vector<size_t> Encoder::column_map(const LoanDataset& ds) const {
    std::vector<size_t> colmap(features_.size());
    for (size_t f = 0; f < features_.size(); ++f) {
        const auto col = ds.column_index(features_[f].feature);
        if (!col) {
            throw ArgumentError("dataset is missing encoder feature: " + features_[f].feature.name);
        }
        if (ds.columns()[*col].second != features_[f].kind) {
            throw ArgumentError("column kind mismatch for feature: " + features_[f].feature.name);
        }
        colmap[f] = *col;
    }
    return colmap;
}

RawRow Encoder::raw_row_mapped(const LoanDataset& ds, size_t row,
                               const std::vector<size_t>& colmap) const {
    RawRow out(features_.size());
    for (size_t f = 0; f < features_.size(); ++f) {
        const size_t c = colmap[f];
        if (features_[f].kind == ColumnKind::Numeric) {
            out[f].num = ds.numeric_at(c, row);
        } else {
            const int32_t code = ds.categorical_at(c, row);
            if (code >= 0) out[f].cat = ds.levels_of(c)[static_cast<size_t>(code)];
        }
    }
    return out;
}

RawRow Encoder::raw_row(const LoanDataset& ds, size_t row) const {
    return raw_row_mapped(ds, row, column_map(ds));
}

std::vector<double> Encoder::encode_row(const RawRow& row) const {
    if (row.size() != features_.size()) {
        throw ArgumentError("raw row width does not match the fitted encoder");
    }
    std::vector<double> out;
    out.reserve(width_);
    for (size_t f = 0; f < features_.size(); ++f) {
        const auto& fs = features_[f];
        if (fs.kind == ColumnKind::Numeric) {
            double x = row[f].num;
            if (std::isnan(x)) x = fs.median;
            if (mode_ == EncodingMode::Gradient) x = (x - fs.mean) / fs.stddev;
            out.push_back(x);
        } else {
            // Unseen levels fold into MISSING (always the last slot).
            size_t slot = fs.levels.size() - 1;
            if (!row[f].cat.empty()) {
                const auto it = std::lower_bound(fs.levels.begin(), fs.levels.end() - 1, row[f].cat);
                if (it != fs.levels.end() - 1 && *it == row[f].cat) {
                    slot = static_cast<size_t>(it - fs.levels.begin());
                }
            }
            if (mode_ == EncodingMode::Tree) {
                out.push_back(static_cast<double>(slot));
            } else {
                for (size_t i = 0; i < fs.levels.size(); ++i) {
                    out.push_back(i == slot ? 1.0 : 0.0);
                }
            }
        }
    }
    return out;
}

EncodedMatrix Encoder::transform(const LoanDataset& ds) const {
    EncodedMatrix m;
    m.rows = ds.row_count();
    m.cols = width_;
    m.col_names = col_names_;
    m.col_feature = col_feature_;
    m.col_is_categorical = col_is_categorical_;
    for (const auto& fs : features_) m.source_features.push_back(fs.feature);
    m.values.resize(m.rows * m.cols);
    m.labels.resize(m.rows);
    const auto colmap = column_map(ds);
    for (size_t r = 0; r < m.rows; ++r) {
        const auto encoded = encode_row(raw_row_mapped(ds, r, colmap));
        std::copy(encoded.begin(), encoded.end(), m.row(r));
        m.labels[r] = static_cast<uint8_t>(ds.target_at(r));
    }
    return m;
}

RawRow Encoder::reference_row() const {
    RawRow out(features_.size());
    for (size_t f = 0; f < features_.size(); ++f) {
        if (features_[f].kind == ColumnKind::Numeric) {
            out[f].num = features_[f].median;
        } else if (features_[f].mode_level != kMissingLevel) {
            out[f].cat = features_[f].mode_level;
        }
    }
    return out;
}

nlohmann::json Encoder::to_json() const {
    nlohmann::json feats = nlohmann::json::array();
    for (const auto& fs : features_) {
        nlohmann::json entry{{"feature", fs.feature.name},
                             {"kind", fs.kind == ColumnKind::Numeric ? "numeric" : "categorical"}};
        if (fs.kind == ColumnKind::Numeric) {
            entry["median"] = fs.median;
            entry["mean"] = fs.mean;
            entry["stddev"] = fs.stddev;
        } else {
            entry["levels"] = fs.levels;
            entry["mode_level"] = fs.mode_level;
        }
        feats.push_back(std::move(entry));
    }
    return nlohmann::json{{"mode", encoding_mode_name(mode_)}, {"features", std::move(feats)}};
}

Encoder Encoder::from_json(const nlohmann::json& doc) {
    Encoder enc;
    try {
        enc.mode_ = encoding_mode_from_name(doc.at("mode").get<std::string>());
        for (const auto& entry : doc.at("features")) {
            FeatureStats fs;
            fs.feature = FeatureId{entry.at("feature").get<std::string>()};
            const auto kind = entry.at("kind").get<std::string>();
            if (kind == "numeric") {
                fs.kind = ColumnKind::Numeric;
                fs.median = entry.at("median").get<double>();
                fs.mean = entry.at("mean").get<double>();
                fs.stddev = entry.at("stddev").get<double>();
            } else if (kind == "categorical") {
                fs.kind = ColumnKind::Categorical;
                fs.levels = entry.at("levels").get<std::vector<std::string>>();
                fs.mode_level = entry.at("mode_level").get<std::string>();
                if (fs.levels.empty() || fs.levels.back() != kMissingLevel ||
                    !std::is_sorted(fs.levels.begin(), fs.levels.end() - 1)) {
                    throw ParseError("encoder levels for " + fs.feature.name +
                                     " must be sorted and end with " + std::string(kMissingLevel));
                }
            } else {
                throw ParseError("unknown column kind in encoder: " + kind);
            }
            enc.features_.push_back(std::move(fs));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("encoder payload: ") + e.what());
    }
    enc.finish();
    return enc;
}

} // namespace fivec
