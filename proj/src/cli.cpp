#include "fivec/cli.hpp"

#include "fivec/concepts.hpp"
#include "fivec/corpus.hpp"
#include "fivec/errors.hpp"
#include "fivec/evaluator.hpp"
#include "fivec/explainer.hpp"
#include "fivec/hash.hpp"
#include "fivec/loans.hpp"
#include "fivec/miner.hpp"
#include "fivec/models.hpp"
#include "fivec/rational.hpp"
#include "fivec/synthetic.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace fivec {

namespace {

namespace fs = std::filesystem;

void require_input(const std::string& path, const std::string& what) {
    if (path.empty()) throw ArgumentError(what + " path is empty");
    if (!fs::exists(path)) throw ArgumentError(what + " not found: " + path);
}

nlohmann::json read_json_input(const std::string& path, const std::string& what) {
    require_input(path, what);
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + what + ": " + path);
    try {
        nlohmann::json doc;
        in >> doc;
        return doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(what + " " + path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& content) {
    if (const fs::path parent = fs::path(path).parent_path(); !parent.empty()) {
        fs::create_directories(parent);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + path);
    out << content;
    if (!out) throw IoError("failed writing: " + path);
}

std::string config_hash_hex(const nlohmann::json& config) {
    return to_hex(fnv1a64(config.dump()));
}

AliasTable alias_table(const std::string& path) {
    if (path.empty()) return AliasTable::builtin();
    require_input(path, "alias table");
    return AliasTable::load(path);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::string part;
    for (const char c : text) {
        if (c == ',') {
            if (!part.empty()) parts.push_back(part);
            part.clear();
        } else {
            part.push_back(c);
        }
    }
    if (!part.empty()) parts.push_back(part);
    return parts;
}

std::string sibling_path(const std::string& base, const char* extension) {
    fs::path p(base);
    p.replace_extension(extension);
    return p.string();
}

// ---------------------------------------------------------------- mine ----

struct MineArgs {
    std::string corpus;
    std::string aliases;
    std::string out = "itemsets.json";
    std::string summary;
    std::string min_support = "0.05";
    int max_len = 8;
    int jobs = 1;
};

int cmd_mine(const MineArgs& args) {
    const AliasTable aliases = alias_table(args.aliases);
    require_input(args.corpus, "corpus");
    const FeatureCorpus corpus = load_corpus(args.corpus, aliases);

    MiningConfig config;
    config.min_support = parse_support_threshold(args.min_support);
    if (args.max_len < 1) throw ArgumentError("max length must be >= 1");
    config.max_len = args.max_len;
    config.jobs = args.jobs;

    const auto itemsets = mine_frequent(corpus, config);
    write_text(args.out, itemsets_to_json(itemsets).dump(2) + "\n");

    std::map<std::string, size_t> by_length;
    for (const auto& set : itemsets) ++by_length[std::to_string(set.features.size())];
    const nlohmann::json config_json{{"command", "mine"},
                                     {"corpus", args.corpus},
                                     {"min_support", rat_to_string(config.min_support)},
                                     {"max_len", config.max_len}};
    const nlohmann::json summary{{"format_version", 1},
                                 {"config_hash", config_hash_hex(config_json)},
                                 {"seeds", nlohmann::json::object()},
                                 {"config", config_json},
                                 {"papers", corpus.paper_count()},
                                 {"universe_features", corpus.universe().size()},
                                 {"total_itemsets", itemsets.size()},
                                 {"by_length", by_length}};
    const std::string summary_path =
        args.summary.empty() ? sibling_path(args.out, ".summary.json") : args.summary;
    write_text(summary_path, summary.dump(2) + "\n");

    size_t at_max = 0;
    for (const auto& set : itemsets) {
        if (static_cast<int>(set.features.size()) == config.max_len) ++at_max;
    }
    std::cout << "mined " << itemsets.size() << " frequent itemsets from " << corpus.paper_count()
              << " papers (" << at_max << " of length " << config.max_len << ") -> " << args.out
              << "\n";
    return 0;
}

// ---------------------------------------------------------- generalize ----

struct GeneralizeArgs {
    std::string itemsets;
    std::string concept_map;
    std::string aliases;
    std::string out = "generalized.json";
};

int cmd_generalize(const GeneralizeArgs& args) {
    const AliasTable aliases = alias_table(args.aliases);
    require_input(args.itemsets, "itemsets file");
    const auto itemsets = load_itemsets(args.itemsets, aliases);

    ConceptMap map = default_concept_map();
    if (!args.concept_map.empty()) {
        require_input(args.concept_map, "concept map");
        map = ConceptMap::load(args.concept_map, aliases);
    }

    const auto eights = filter_by_length(itemsets, kGeneralizedSetLen);
    const auto sets = generalize(eights, map);

    nlohmann::json sets_json = nlohmann::json::array();
    for (const auto& set : sets) sets_json.push_back(generalized_set_to_json(set));
    const nlohmann::json config_json{{"command", "generalize"},
                                     {"itemsets", args.itemsets},
                                     {"concept_map", args.concept_map.empty() ? "builtin"
                                                                              : args.concept_map}};
    const nlohmann::json doc{{"format_version", 1},
                             {"config_hash", config_hash_hex(config_json)},
                             {"seeds", nlohmann::json::object()},
                             {"config", config_json},
                             {"input_itemsets", itemsets.size()},
                             {"length_filtered", eights.size()},
                             {"concept_map", map.to_json()},
                             {"sets", std::move(sets_json)}};
    write_text(args.out, doc.dump(2) + "\n");

    std::cout << "generalized " << sets.size() << " of " << eights.size() << " length-"
              << kGeneralizedSetLen << " itemsets (" << itemsets.size() << " total) -> "
              << args.out << "\n";
    return 0;
}

// --------------------------------------------------------------- synth ----

struct SynthArgs {
    std::string config;
    std::string out = "loans.csv";
    std::string schema_out;
    uint64_t seed = 0;
    long long rows = -1;
    double ratio = -1.0;
};

int cmd_synth(const SynthArgs& args) {
    const AliasTable aliases = AliasTable::builtin();
    GeneratorConfig config = GeneratorConfig::from_json(nlohmann::json::object(), aliases);
    if (!args.config.empty()) {
        require_input(args.config, "generator config");
        config = GeneratorConfig::load(args.config, aliases);
    }
    if (args.rows >= 0) config.rows = static_cast<size_t>(args.rows);
    if (args.ratio >= 0.0) config.positive_ratio = args.ratio;

    const LoanDataset ds = generate_synthetic(config, args.seed);
    const SchemaConfig schema = synthetic_schema(config);
    if (const fs::path parent = fs::path(args.out).parent_path(); !parent.empty()) {
        fs::create_directories(parent);
    }
    save_loans_csv(ds, schema, args.out);

    const std::string schema_path =
        args.schema_out.empty() ? sibling_path(args.out, ".schema.json") : args.schema_out;
    write_text(schema_path, schema.to_json().dump(2) + "\n");

    const nlohmann::json config_json{
        {"command", "synth"}, {"generator", config.to_json()}, {"seed", args.seed}};
    const nlohmann::json meta{{"format_version", 1},
                              {"config_hash", config_hash_hex(config_json)},
                              {"seeds", {{"generator", args.seed}}},
                              {"config", config_json},
                              {"rows", ds.row_count()},
                              {"positives", ds.positive_count()},
                              {"positive_ratio", ds.positive_ratio()},
                              {"schema", schema_path}};
    write_text(sibling_path(args.out, ".meta.json"), meta.dump(2) + "\n");

    std::cout << "wrote " << ds.row_count() << " rows (" << ds.positive_count()
              << " positives, ratio " << ds.positive_ratio() << ") -> " << args.out << "\n";
    return 0;
}

// ------------------------------------------------------------ evaluate ----

struct EvaluateArgs {
    std::string data;
    std::string schema;
    std::string sets;
    std::string aliases;
    std::string features; // comma list; empty = all columns (or --keep)
    int keep = 0;
    std::string models = "ANN,SVM,RF,ET,GB";
    std::string model_config;
    uint64_t seed = 0;
    double train_fraction = 0.7;
    double threshold = 0.05;
    std::string metric = "recall";
    double classify_threshold = 0.5;
    int jobs = 1;
    bool omit_timings = false;
    std::string out_dir = ".";
    std::string save_models;
};

std::vector<GeneralizedFeatureSet> load_generalized_sets(const std::string& path,
                                                         const AliasTable& aliases) {
    const nlohmann::json doc = read_json_input(path, "generalized sets file");
    const nlohmann::json* sets = &doc;
    if (doc.is_object()) {
        if (!doc.contains("sets")) {
            throw ParseError("generalized sets file " + path + ": missing \"sets\"");
        }
        sets = &doc.at("sets");
    }
    if (!sets->is_array() || sets->empty()) {
        throw ValidationError("generalized sets file " + path + " holds no sets");
    }
    std::vector<GeneralizedFeatureSet> out;
    for (const auto& item : *sets) out.push_back(generalized_set_from_json(item, aliases));
    return out;
}

std::vector<ModelSpec> resolve_model_specs(const EvaluateArgs& args, uint64_t base_seed) {
    std::vector<ModelSpec> specs;
    if (!args.model_config.empty()) {
        const nlohmann::json doc = read_json_input(args.model_config, "model config");
        if (!doc.is_array() || doc.empty()) {
            throw ParseError("model config must be a non-empty JSON array of model specs");
        }
        for (const auto& item : doc) {
            ModelSpec spec = ModelSpec::from_json(item);
            if (!item.contains("seed")) {
                spec.seed = mix_seed(base_seed, 1 + specs.size());
            }
            specs.push_back(std::move(spec));
        }
        return specs;
    }
    const auto names = split_list(args.models);
    if (names.empty()) throw ArgumentError("no models requested");
    for (const auto& name : names) {
        ModelSpec spec;
        spec.kind = model_kind_from_name(name);
        spec.seed = mix_seed(base_seed, 1 + specs.size());
        specs.push_back(std::move(spec));
    }
    return specs;
}

int cmd_evaluate(const EvaluateArgs& args) {
    const AliasTable aliases = alias_table(args.aliases);
    require_input(args.schema, "schema");
    const SchemaConfig schema = SchemaConfig::load(args.schema, aliases);
    require_input(args.data, "loan data");
    const LoanDataset ds = load_loans(args.data, schema, aliases);

    ExperimentPlan plan;
    plan.generalized_sets = load_generalized_sets(args.sets, aliases);
    plan.model_specs = resolve_model_specs(args, args.seed);
    plan.split.train_fraction = args.train_fraction;
    plan.split.seed = mix_seed(args.seed, 0);
    plan.threshold = args.threshold;
    plan.selection_metric = args.metric;
    plan.classify_threshold = args.classify_threshold;
    plan.jobs = args.jobs > 0 ? static_cast<size_t>(args.jobs) : 1;

    if (!args.features.empty()) {
        for (const auto& name : split_list(args.features)) {
            plan.original_features.push_back(aliases.canon(name));
        }
    } else if (args.keep > 0) {
        plan.original_features =
            select_features(ds, static_cast<size_t>(args.keep), mix_seed(args.seed, 100));
    } else {
        for (const auto& col : ds.columns()) plan.original_features.push_back(col.first);
    }

    const ComparisonReport report = run_experiment(ds, plan);

    nlohmann::json model_seeds = nlohmann::json::object();
    nlohmann::json specs_json = nlohmann::json::array();
    for (const auto& spec : plan.model_specs) {
        model_seeds[model_kind_name(spec.kind)] = spec.seed;
        specs_json.push_back(spec.to_json());
    }
    const nlohmann::json config_json{{"command", "evaluate"},
                                     {"data", args.data},
                                     {"schema", args.schema},
                                     {"sets", args.sets},
                                     {"original_features", feature_names(plan.original_features)},
                                     {"models", specs_json},
                                     {"train_fraction", plan.split.train_fraction},
                                     {"split_seed", plan.split.seed},
                                     {"threshold", plan.threshold},
                                     {"selection_metric", plan.selection_metric},
                                     {"classify_threshold", plan.classify_threshold},
                                     {"base_seed", args.seed},
                                     {"omit_timings", args.omit_timings}};
    const std::string hash = config_hash_hex(config_json);

    fs::create_directories(args.out_dir);
    const std::string csv_path = (fs::path(args.out_dir) / "report.csv").string();
    const std::string json_path = (fs::path(args.out_dir) / "report.json").string();

    char header[160];
    std::snprintf(header, sizeof header, "# config_hash=%s base_seed=%llu split_seed=%llu\n",
                  hash.c_str(), static_cast<unsigned long long>(args.seed),
                  static_cast<unsigned long long>(plan.split.seed));
    write_text(csv_path, std::string(header) + report.to_csv(!args.omit_timings));

    const nlohmann::json artifact{{"format_version", 1},
                                  {"config_hash", hash},
                                  {"seeds",
                                   {{"base", args.seed},
                                    {"split", plan.split.seed},
                                    {"models", model_seeds}}},
                                  {"config", config_json},
                                  {"report", report.to_json(!args.omit_timings)}};
    write_text(json_path, artifact.dump(2) + "\n");

    if (!args.save_models.empty()) {
        fs::create_directories(args.save_models);
        const SplitResult split = stratified_split(ds, plan.split);
        for (size_t m = 0; m < plan.model_specs.size(); ++m) {
            const auto& spec = plan.model_specs[m];
            const auto& comparison = report.models[m];
            const EncodingMode mode =
                is_tree_kind(spec.kind) ? EncodingMode::Tree : EncodingMode::Gradient;
            const std::string kind_name = model_kind_name(spec.kind);
            if (!comparison.baseline.failed) {
                const Encoder enc = Encoder::fit(split.train, mode, plan.original_features);
                const TrainedModel model = fit_model(spec, enc.transform(split.train));
                save_model_artifact(
                    (fs::path(args.save_models) / ("model_" + kind_name + ".json")).string(),
                    model, enc, !args.omit_timings);
            }
            if (comparison.best_set >= 0) {
                const auto& set = plan.generalized_sets[static_cast<size_t>(comparison.best_set)];
                const Encoder enc = Encoder::fit(split.train, mode, set.features);
                const TrainedModel model = fit_model(spec, enc.transform(split.train));
                save_model_artifact(
                    (fs::path(args.save_models) / ("model_" + kind_name + "-G.json")).string(),
                    model, enc, !args.omit_timings);
            }
        }
    }

    for (const auto& mc : report.models) {
        std::cout << model_kind_name(mc.kind) << ": ";
        if (mc.baseline.failed) {
            std::cout << "baseline failed (" << mc.baseline.error << ")";
        } else {
            std::cout << plan.selection_metric << " "
                      << metric_value(mc.baseline, plan.selection_metric);
        }
        if (mc.best_set >= 0) {
            std::cout << " -> best generalized "
                      << metric_value(mc.generalized[static_cast<size_t>(mc.best_set)],
                                      plan.selection_metric)
                      << " (set " << mc.best_set << "), accept="
                      << (mc.accept ? "true" : "false");
        }
        std::cout << "\n";
    }
    std::cout << "report -> " << csv_path << ", " << json_path << "\n";
    return 0;
}

// ------------------------------------------------------------- explain ----

struct ExplainArgs {
    std::string model;
    std::string data;
    std::string schema;
    std::string aliases;
    std::string concept_map;
    std::string rows = "0";
    std::string out = "explanations.json";
    int jobs = 1;
};

int cmd_explain(const ExplainArgs& args) {
    const AliasTable aliases = alias_table(args.aliases);
    require_input(args.model, "model artifact");
    const auto [model, encoder] = load_model_artifact(args.model);

    require_input(args.schema, "schema");
    const SchemaConfig schema = SchemaConfig::load(args.schema, aliases);
    require_input(args.data, "loan data");
    const LoanDataset ds = load_loans(args.data, schema, aliases);

    ConceptMap map = default_concept_map();
    if (!args.concept_map.empty()) {
        require_input(args.concept_map, "concept map");
        map = ConceptMap::load(args.concept_map, aliases);
    }

    std::vector<size_t> rows;
    if (args.rows != "all") {
        for (const auto& token : split_list(args.rows)) {
            try {
                rows.push_back(std::stoul(token));
            } catch (const std::exception&) {
                throw ArgumentError("bad row selector: " + token);
            }
        }
        if (rows.empty()) throw ArgumentError("empty row selector");
    }

    const auto reports = explain_batch(model, encoder, ds, rows, map,
                                       args.jobs > 0 ? static_cast<size_t>(args.jobs) : 1);

    // Boundary re-check of the additive identity before anything is emitted.
    for (const auto& report : reports) {
        if (report.failed) continue;
        double reconstructed = report.baseline;
        double concept_sum = report.unmapped_total;
        for (const auto& [feature, phi] : report.contributions) reconstructed += phi;
        for (const auto& [c, total] : report.concept_totals) concept_sum += total;
        double feature_sum = 0.0;
        for (const auto& [feature, phi] : report.contributions) feature_sum += phi;
        if (std::abs(reconstructed - report.p_default) > 1e-9 ||
            std::abs(concept_sum - feature_sum) > 1e-12) {
            throw ContractError("explanation for sample " + report.sample_id +
                                " fails the additive identity");
        }
    }

    nlohmann::json explanations = nlohmann::json::array();
    size_t failed = 0;
    for (const auto& report : reports) {
        explanations.push_back(report.to_json());
        if (report.failed) ++failed;
    }
    const nlohmann::json config_json{{"command", "explain"},
                                     {"model", args.model},
                                     {"data", args.data},
                                     {"rows", args.rows}};
    const nlohmann::json doc{{"format_version", 1},
                             {"config_hash", config_hash_hex(config_json)},
                             {"seeds", nlohmann::json::object()},
                             {"config", config_json},
                             {"explanations", std::move(explanations)}};
    write_text(args.out, doc.dump(2) + "\n");

    std::cout << "explained " << (reports.size() - failed) << " of " << reports.size()
              << " samples -> " << args.out << "\n";
    return failed == 0 ? 0 : 1;
}

int fail_with(const std::exception& e) {
    const char* type = "internal";
    int code = 1;
    if (dynamic_cast<const ArgumentError*>(&e)) {
        type = "argument";
        code = 2;
    } else if (dynamic_cast<const ValidationError*>(&e)) {
        type = "validation";
        code = 2;
    } else if (dynamic_cast<const ParseError*>(&e)) {
        type = "parse";
        code = 2;
    } else if (dynamic_cast<const IoError*>(&e)) {
        type = "io";
    } else if (dynamic_cast<const UnsupportedError*>(&e)) {
        type = "unsupported";
    } else if (dynamic_cast<const ContractError*>(&e)) {
        type = "contract";
    }
    std::cerr << nlohmann::json{{"error", {{"type", type}, {"message", e.what()}}}}.dump()
              << std::endl;
    return code;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Domain-concept feature generalization and evaluation for "
                 "loan-default models"};
    app.require_subcommand(1);

    MineArgs mine_args;
    auto* mine = app.add_subcommand("mine", "Mine frequent feature sets from a literature corpus");
    mine->add_option("--corpus", mine_args.corpus, "corpus JSON file")->required();
    mine->add_option("--aliases", mine_args.aliases, "feature alias table JSON");
    mine->add_option("--min-support", mine_args.min_support,
                     "support threshold, decimal or num/den");
    mine->add_option("--max-len", mine_args.max_len, "largest itemset length");
    mine->add_option("--jobs", mine_args.jobs, "parallel workers");
    mine->add_option("--out", mine_args.out, "itemsets output path");
    mine->add_option("--summary", mine_args.summary, "summary output path");

    GeneralizeArgs gen_args;
    auto* gen = app.add_subcommand("generalize",
                                   "Keep length-8 itemsets covering all five credit concepts");
    gen->add_option("--itemsets", gen_args.itemsets, "mined itemsets JSON")->required();
    gen->add_option("--concept-map", gen_args.concept_map, "concept map JSON (default: bundled)");
    gen->add_option("--aliases", gen_args.aliases, "feature alias table JSON");
    gen->add_option("--out", gen_args.out, "generalized sets output path");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic loan dataset");
    synth->add_option("--config", synth_args.config, "generator config JSON");
    synth->add_option("--rows", synth_args.rows, "row count override");
    synth->add_option("--ratio", synth_args.ratio, "positive ratio override");
    synth->add_option("--seed", synth_args.seed, "generator seed");
    synth->add_option("--out", synth_args.out, "CSV output path");
    synth->add_option("--schema-out", synth_args.schema_out, "schema JSON output path");

    EvaluateArgs eval_args;
    auto* eval = app.add_subcommand("evaluate",
                                    "Compare baseline features against generalized sets");
    eval->add_option("--data", eval_args.data, "loan CSV")->required();
    eval->add_option("--schema", eval_args.schema, "schema JSON")->required();
    eval->add_option("--sets", eval_args.sets, "generalized sets JSON")->required();
    eval->add_option("--aliases", eval_args.aliases, "feature alias table JSON");
    eval->add_option("--features", eval_args.features, "baseline features (comma list)");
    eval->add_option("--keep", eval_args.keep,
                     "baseline = top-N features by forest importance ranking");
    eval->add_option("--models", eval_args.models, "model kinds (comma list)");
    eval->add_option("--model-config", eval_args.model_config, "model spec JSON array");
    eval->add_option("--seed", eval_args.seed, "base seed");
    eval->add_option("--train-fraction", eval_args.train_fraction, "stratified split fraction");
    eval->add_option("--threshold", eval_args.threshold, "allowable metric drop");
    eval->add_option("--metric", eval_args.metric, "selection metric");
    eval->add_option("--classify-threshold", eval_args.classify_threshold,
                     "probability cutoff for the confusion matrix");
    eval->add_option("--jobs", eval_args.jobs, "parallel workers for the sweep");
    eval->add_flag("--omit-timings", eval_args.omit_timings,
                   "write wall times as 0 for byte-stable artifacts");
    eval->add_option("--out-dir", eval_args.out_dir, "report output directory");
    eval->add_option("--save-models", eval_args.save_models,
                     "also write model artifacts into this directory");

    ExplainArgs explain_args;
    auto* explain = app.add_subcommand("explain",
                                       "Per-sample additive feature contributions");
    explain->add_option("--model", explain_args.model, "model artifact JSON")->required();
    explain->add_option("--data", explain_args.data, "loan CSV")->required();
    explain->add_option("--schema", explain_args.schema, "schema JSON")->required();
    explain->add_option("--aliases", explain_args.aliases, "feature alias table JSON");
    explain->add_option("--concept-map", explain_args.concept_map,
                        "concept map JSON (default: bundled)");
    explain->add_option("--rows", explain_args.rows, "row selector: comma list or 'all'");
    explain->add_option("--out", explain_args.out, "explanations output path");
    explain->add_option("--jobs", explain_args.jobs, "parallel workers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help / --version
        std::cerr << nlohmann::json{{"error", {{"type", "usage"}, {"message", e.what()}}}}.dump()
                  << std::endl;
        return 2;
    }

    try {
        if (mine->parsed()) return cmd_mine(mine_args);
        if (gen->parsed()) return cmd_generalize(gen_args);
        if (synth->parsed()) return cmd_synth(synth_args);
        if (eval->parsed()) return cmd_evaluate(eval_args);
        if (explain->parsed()) return cmd_explain(explain_args);
        throw ContractError("no subcommand dispatched");
    } catch (const std::exception& e) {
        return fail_with(e);
    }
}

} // namespace fivec
