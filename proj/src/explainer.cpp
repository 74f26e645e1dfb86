#include "fivec/explainer.hpp"

#include "fivec/errors.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>

namespace fivec {

ShapleyExplainer::ShapleyExplainer(const TrainedModel& model, const Encoder& encoder)
    : model_(model), encoder_(encoder) {
    const size_t n = encoder_.features().size();
    if (n == 0) throw ArgumentError("explainer needs at least one feature");
    if (n > kMaxShapleyFeatures) {
        throw UnsupportedError("exact Shapley enumeration is capped at " +
                               std::to_string(kMaxShapleyFeatures) + " features, got " +
                               std::to_string(n));
    }
    // The encoded layout must be exactly what the model was trained on.
    if (encoder_.column_names() != model_.columns) {
        throw ContractError("encoder layout does not match the model's feature list");
    }

    reference_ = encoder_.reference_row();

    // w(s) = s! (n-1-s)! / n! for the size of the coalition S excluding the
    // feature being attributed. Factorials up to 12! are exact in double.
    weights_.resize(n);
    std::vector<double> factorial(n + 1, 1.0);
    for (size_t k = 1; k <= n; ++k) factorial[k] = factorial[k - 1] * static_cast<double>(k);
    for (size_t s = 0; s < n; ++s) {
        weights_[s] = factorial[s] * factorial[n - 1 - s] / factorial[n];
    }
}

double ShapleyExplainer::coalition_value(const RawRow& instance, uint32_t mask) const {
    RawRow mixed = reference_;
    for (size_t f = 0; f < mixed.size(); ++f) {
        if (mask & (uint32_t{1} << f)) mixed[f] = instance[f];
    }
    const auto encoded = encoder_.encode_row(mixed);
    return model_.predict_row(encoded.data());
}

ContributionReport ShapleyExplainer::explain(const RawRow& instance,
                                             std::string sample_id) const {
    const size_t n = encoder_.features().size();
    if (instance.size() != n) {
        throw ArgumentError("instance width does not match the fitted encoder");
    }

    const uint32_t full = (uint32_t{1} << n) - 1;
    std::vector<double> value(full + 1);
    for (uint32_t mask = 0; mask <= full; ++mask) {
        value[mask] = coalition_value(instance, mask);
    }

    ContributionReport report;
    report.sample_id = std::move(sample_id);
    report.baseline = value[0];
    report.p_default = value[full];
    for (size_t g = 0; g < n; ++g) {
        const uint32_t bit = uint32_t{1} << g;
        double phi = 0.0;
        for (uint32_t mask = 0; mask <= full; ++mask) {
            if (mask & bit) continue;
            phi += weights_[std::popcount(mask)] * (value[mask | bit] - value[mask]);
        }
        report.contributions.emplace_back(encoder_.features()[g].feature, phi);
    }

    double reconstructed = report.baseline;
    for (const auto& [feature, phi] : report.contributions) reconstructed += phi;
    if (std::abs(reconstructed - report.p_default) > 1e-9) {
        throw ContractError("Shapley efficiency violated: baseline plus contributions is " +
                            std::to_string(reconstructed) + " but the prediction is " +
                            std::to_string(report.p_default));
    }
    return report;
}

ContributionReport aggregate_by_concept(ContributionReport report, const ConceptMap& map) {
    report.concept_totals.clear();
    report.unmapped_total = 0.0;
    for (const Concept c : kAllConcepts) report.concept_totals[c] = 0.0;
    for (const auto& [feature, phi] : report.contributions) {
        if (const auto c = map.concept_of(feature)) {
            report.concept_totals[*c] += phi;
        } else {
            report.unmapped_total += phi;
        }
    }
    report.aggregated = true;
    return report;
}

std::vector<ContributionReport> explain_batch(const TrainedModel& model, const Encoder& encoder,
                                              const LoanDataset& ds,
                                              const std::vector<size_t>& rows,
                                              const ConceptMap& map, size_t jobs) {
    const ShapleyExplainer explainer(model, encoder);

    std::vector<size_t> selected = rows;
    if (selected.empty()) {
        selected.resize(ds.row_count());
        for (size_t r = 0; r < selected.size(); ++r) selected[r] = r;
    }
    for (const size_t r : selected) {
        if (r >= ds.row_count()) {
            throw ArgumentError("sample row " + std::to_string(r) + " out of range (dataset has " +
                                std::to_string(ds.row_count()) + " rows)");
        }
    }

    std::vector<ContributionReport> reports(selected.size());
    auto explain_one = [&](size_t i) {
        const size_t r = selected[i];
        try {
            const RawRow instance = explainer.encoder().raw_row(ds, r);
            reports[i] = aggregate_by_concept(explainer.explain(instance, std::to_string(r)), map);
        } catch (const std::exception& e) {
            reports[i].sample_id = std::to_string(r);
            reports[i].failed = true;
            reports[i].error = e.what();
        }
    };
    const auto count = static_cast<long long>(selected.size());
    if (jobs > 1) {
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic) num_threads(static_cast<int>(jobs))
#endif
        for (long long i = 0; i < count; ++i) explain_one(static_cast<size_t>(i));
    } else {
        for (long long i = 0; i < count; ++i) explain_one(static_cast<size_t>(i));
    }
    return reports;
}

nlohmann::json ContributionReport::to_json() const {
    nlohmann::json doc{{"sample_id", sample_id}};
    if (failed) {
        doc["failed"] = true;
        doc["error"] = error;
        return doc;
    }
    doc["p_default"] = p_default;
    doc["baseline"] = baseline;

    nlohmann::json features = nlohmann::json::object();
    double abs_total = 0.0;
    for (const auto& [feature, phi] : contributions) {
        features[feature.name] = phi;
        abs_total += std::abs(phi);
    }
    doc["features"] = std::move(features);

    // Derived share-of-total-risk view: contribution / sum of |contribution|,
    // sign kept. The normalization is a reporting choice, hence the note.
    nlohmann::json percent = nlohmann::json::object();
    for (const auto& [feature, phi] : contributions) {
        percent[feature.name] = abs_total > 0.0 ? phi / abs_total : 0.0;
    }
    doc["share_of_total_risk"] = std::move(percent);
    doc["share_note"] = "share = contribution / sum(|contribution|), sign preserved; "
                        "shares are a derived view, not part of the additive identity";

    if (aggregated) {
        nlohmann::json concepts = nlohmann::json::object();
        for (const auto& [c, total] : concept_totals) concepts[concept_name(c)] = total;
        concepts["other"] = unmapped_total;
        doc["concepts"] = std::move(concepts);
    }
    return doc;
}

} // namespace fivec
