#pragma once

#include "fivec/concepts.hpp"
#include "fivec/models.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <string>
#include <vector>

namespace fivec {

// Exact-enumeration bound: 2^n coalition evaluations per sample.
inline constexpr size_t kMaxShapleyFeatures = 12;

// One prediction decomposed into additive per-feature contributions:
// baseline + sum of contributions = p_default exactly (up to float noise).
// The baseline is the model output at the reference input; a feature's
// contribution is its exact Shapley value under the replace-with-reference
// value function.
struct ContributionReport {
    std::string sample_id;
    double p_default = 0.0;
    double baseline = 0.0;
    std::vector<std::pair<FeatureId, double>> contributions;
    std::map<Concept, double> concept_totals; // filled by aggregate_by_concept
    double unmapped_total = 0.0;
    bool aggregated = false;
    bool failed = false;
    std::string error;

    nlohmann::json to_json() const;
};

class ShapleyExplainer {
public:
    // The encoder must be the one the model was fitted with (encoded column
    // names are cross-checked) and may cover at most kMaxShapleyFeatures
    // source features.
    ShapleyExplainer(const TrainedModel& model, const Encoder& encoder);

    ContributionReport explain(const RawRow& instance, std::string sample_id) const;

    const RawRow& reference() const { return reference_; }
    const Encoder& encoder() const { return encoder_; }

private:
    const TrainedModel& model_;
    const Encoder& encoder_;
    RawRow reference_;
    std::vector<double> weights_; // Shapley weight by coalition size

    double coalition_value(const RawRow& instance, uint32_t mask) const;
};

// Sums contributions into the five concept buckets plus the unmapped rest.
ContributionReport aggregate_by_concept(ContributionReport report, const ConceptMap& map);

// Explains the listed view-relative rows of `ds` (all rows when `rows` is
// empty). Per-sample failures are captured in the report, not thrown.
std::vector<ContributionReport> explain_batch(const TrainedModel& model, const Encoder& encoder,
                                              const LoanDataset& ds,
                                              const std::vector<size_t>& rows,
                                              const ConceptMap& map, size_t jobs = 1);

} // namespace fivec
