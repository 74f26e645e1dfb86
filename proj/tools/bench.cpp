// Compares the serial reference paths against the parallel ones on the four
// hot kernels (itemset support counting, forest growth, the evaluation sweep,
// batch explanation) and checks that both produce identical results.
#include "fivec/concepts.hpp"
#include "fivec/corpus.hpp"
#include "fivec/evaluator.hpp"
#include "fivec/explainer.hpp"
#include "fivec/miner.hpp"
#include "fivec/models.hpp"
#include "fivec/rng.hpp"
#include "fivec/synthetic.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Line {
    const char* kernel;
    double serial_s = 0.0;
    double parallel_s = 0.0;
    bool identical = false;
};

void print_line(const Line& line) {
    std::printf("%-12s serial %8.3fs   parallel %8.3fs   speedup %5.2fx   identical %s\n",
                line.kernel, line.serial_s, line.parallel_s,
                line.parallel_s > 0 ? line.serial_s / line.parallel_s : 0.0,
                line.identical ? "yes" : "NO");
}

fivec::FeatureCorpus random_corpus(size_t papers, size_t universe, fivec::Rng& rng) {
    std::vector<fivec::PaperRecord> records;
    records.reserve(papers);
    for (size_t p = 0; p < papers; ++p) {
        fivec::PaperRecord rec;
        rec.paper_id = "p" + std::to_string(p);
        std::vector<fivec::FeatureId> feats;
        for (size_t f = 0; f < universe; ++f) {
            if (rng.next_double() < 0.45) feats.emplace_back("f" + std::to_string(f));
        }
        if (feats.empty()) feats.emplace_back("f0");
        rec.features = std::move(feats);
        records.push_back(std::move(rec));
    }
    return fivec::FeatureCorpus(std::move(records));
}

bool same_itemsets(const std::vector<fivec::ItemSet>& a, const std::vector<fivec::ItemSet>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].features != b[i].features || a[i].support_num != b[i].support_num ||
            a[i].support_den != b[i].support_den) {
            return false;
        }
    }
    return true;
}

} // namespace

int main(int argc, char** argv) {
    int jobs = 4;
#if defined(_OPENMP)
    jobs = omp_get_max_threads();
#endif
    size_t rows = 20000;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--jobs") == 0 && i + 1 < argc) {
            jobs = std::atoi(argv[++i]);
        } else if (std::strcmp(argv[i], "--rows") == 0 && i + 1 < argc) {
            rows = static_cast<size_t>(std::atoll(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: bench [--jobs N] [--rows N]\n");
            return 2;
        }
    }
    std::printf("kernel benchmark: %d parallel workers, %zu synthetic rows\n\n", jobs, rows);

    // --- miner: support counting over a dense random corpus ---------------
    {
        fivec::Rng rng(7);
        const auto corpus = random_corpus(160, 17, rng);
        fivec::MiningConfig config;
        config.min_support = fivec::make_rational(1, 5);
        config.max_len = 6;

        Line line{"miner"};
        config.jobs = 1;
        auto start = Clock::now();
        const auto serial = fivec::mine_frequent(corpus, config);
        line.serial_s = seconds_since(start);

        config.jobs = jobs;
        start = Clock::now();
        const auto parallel = fivec::mine_frequent(corpus, config);
        line.parallel_s = seconds_since(start);
        line.identical = same_itemsets(serial, parallel);
        print_line(line);
    }

    // --- shared synthetic dataset for the model-side kernels --------------
    fivec::GeneratorConfig gen = fivec::GeneratorConfig::from_json(nlohmann::json::object(),
                                                                   fivec::AliasTable::builtin());
    gen.rows = rows;
    gen.positive_ratio = 0.10;
    const fivec::LoanDataset ds = fivec::generate_synthetic(gen, 11);
    const fivec::SplitResult split = fivec::stratified_split(ds, fivec::SplitSpec{0.7, 1});
    std::vector<fivec::FeatureId> all_features;
    for (const auto& col : ds.columns()) all_features.push_back(col.first);

    // --- forest: per-tree growth -------------------------------------------
    {
        const auto enc = fivec::Encoder::fit(split.train, fivec::EncodingMode::Tree, all_features);
        const auto X = enc.transform(split.train);

        fivec::ForestConfig config;
        config.tree_count = 40;
        Line line{"forest"};

        config.jobs = 1;
        auto start = Clock::now();
        const auto serial = fivec::fit_forest(X, config, 3);
        line.serial_s = seconds_since(start);

        config.jobs = static_cast<size_t>(jobs);
        start = Clock::now();
        const auto parallel = fivec::fit_forest(X, config, 3);
        line.parallel_s = seconds_since(start);

        line.identical = serial.to_json().dump() == parallel.to_json().dump() &&
                         serial.importance == parallel.importance;
        print_line(line);
    }

    // --- evaluator: the full model sweep -----------------------------------
    fivec::ExperimentPlan plan;
    {
        plan.original_features = all_features;
        fivec::GeneralizedFeatureSet set;
        set.features = {fivec::FeatureId("cltvoriginal"), fivec::FeatureId("creditscore"),
                        fivec::FeatureId("currentloandelinquencystatus"),
                        fivec::FeatureId("interestratecurrent"), fivec::FeatureId("postalcode"),
                        fivec::FeatureId("propertystate"), fivec::FeatureId("upbactual"),
                        fivec::FeatureId("upboriginal")};
        set.support = fivec::make_rational(1, 2);
        set.coverage = fivec::covers_all_concepts(set.features, fivec::default_concept_map());
        plan.generalized_sets = {set};
        for (const auto kind :
             {fivec::ModelKind::RandomForest, fivec::ModelKind::ExtraTrees,
              fivec::ModelKind::GradientBoosting}) {
            fivec::ModelSpec spec;
            spec.kind = kind;
            spec.seed = fivec::mix_seed(5, 1 + plan.model_specs.size());
            spec.forest.tree_count = 30;
            spec.boosting.rounds = 30;
            plan.model_specs.push_back(spec);
        }
        plan.split.seed = 1;

        Line line{"evaluate"};
        plan.jobs = 1;
        auto start = Clock::now();
        auto serial = fivec::run_experiment(ds, plan);
        line.serial_s = seconds_since(start);

        plan.jobs = static_cast<size_t>(jobs);
        start = Clock::now();
        auto parallel = fivec::run_experiment(ds, plan);
        line.parallel_s = seconds_since(start);

        line.identical = serial.to_json(false).dump() == parallel.to_json(false).dump();
        print_line(line);
    }

    // --- explainer: batch Shapley over the holdout --------------------------
    {
        const auto& set = plan.generalized_sets[0];
        const auto enc = fivec::Encoder::fit(split.train, fivec::EncodingMode::Tree, set.features);
        fivec::ModelSpec spec;
        spec.kind = fivec::ModelKind::RandomForest;
        spec.seed = 5;
        spec.forest.tree_count = 30;
        const auto model = fivec::fit_model(spec, enc.transform(split.train));

        std::vector<size_t> sample_rows;
        for (size_t r = 0; r < split.test.row_count() && sample_rows.size() < 64; r += 7) {
            sample_rows.push_back(r);
        }
        const auto map = fivec::default_concept_map();

        Line line{"explain"};
        auto start = Clock::now();
        const auto serial = fivec::explain_batch(model, enc, split.test, sample_rows, map, 1);
        line.serial_s = seconds_since(start);

        start = Clock::now();
        const auto parallel = fivec::explain_batch(model, enc, split.test, sample_rows, map,
                                                   static_cast<size_t>(jobs));
        line.parallel_s = seconds_since(start);

        line.identical = serial.size() == parallel.size();
        for (size_t i = 0; line.identical && i < serial.size(); ++i) {
            line.identical = serial[i].to_json().dump() == parallel[i].to_json().dump();
        }
        print_line(line);
    }

    return 0;
}
