// textsift: corpus refinery pipeline and mixture lab.
//
// One stage per invocation keeps runs composable and inspectable:
//   textsift normalize --config cfg.json --in raw.jsonl --out clean.jsonl
//   textsift dedup --config cfg.json --in a.jsonl --out b.jsonl --rounds 3
//   textsift pipeline --config cfg.json --in raw.jsonl --out-dir out/
//   textsift mixture fit --records runs.jsonl --out model.json
// Exit codes: 0 success, 2 config/usage error, 3 I/O error, 4 contract
// violation inside a stage.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "textsift/bpe.hpp"
#include "textsift/corpus_io.hpp"
#include "textsift/hash.hpp"
#include "textsift/langid.hpp"
#include "textsift/lsh.hpp"
#include "textsift/mixture.hpp"
#include "textsift/ngram_lm.hpp"
#include "textsift/pipeline.hpp"
#include "textsift/report.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitContract = 4;

struct StageArgs {
    std::string config_path;
    std::string in_path;
    std::string out_path;
    std::int64_t seed_override = -1;
    std::int64_t workers_override = -1;
    bool strict = false;
};

sift::PipelineConfig load_config(const StageArgs& args) {
    sift::PipelineConfig config;
    if (!args.config_path.empty()) {
        config = sift::PipelineConfig::load(args.config_path);
    }
    if (args.seed_override >= 0) {
        config.seed = static_cast<std::uint64_t>(args.seed_override);
    }
    if (args.workers_override >= 0) {
        config.workers = static_cast<std::size_t>(args.workers_override);
    }
    if (args.strict) {
        config.strict = true;
    }
    return config;
}

void add_stage_options(CLI::App* cmd, StageArgs& args, bool out_required = true) {
    cmd->add_option("--config", args.config_path, "pipeline config JSON");
    cmd->add_option("--in", args.in_path, "input corpus (JSONL)")->required();
    auto* out = cmd->add_option("--out", args.out_path, "output path");
    if (out_required) {
        out->required();
    }
    cmd->add_option("--seed", args.seed_override, "override the global seed");
    cmd->add_option("--workers", args.workers_override, "worker thread count");
    cmd->add_flag("--strict", args.strict, "fail on malformed input records");
}

int run_single_stage(const std::string& stage, const StageArgs& args) {
    const sift::PipelineConfig config = load_config(args);
    const sift::StageStats stats = sift::run_stage(stage, config, args.in_path, args.out_path);
    sift::write_stage_stats(stats, args.out_path + ".stats.json");
    std::printf("%s: %llu -> %llu docs (kept %.2f%%)\n", stats.stage.c_str(),
                static_cast<unsigned long long>(stats.docs_in),
                static_cast<unsigned long long>(stats.docs_out), 100.0 * stats.kept_rate());
    return kExitOk;
}

int run_pipeline(const StageArgs& args) {
    sift::PipelineConfig config = load_config(args);
    if (config.stages.empty()) {
        throw sift::ConfigError("pipeline command needs a non-empty \"pipeline\" stage list");
    }
    std::filesystem::create_directories(args.out_path);
    std::string current_in = args.in_path;
    std::vector<sift::StageStats> all_stats;
    for (std::size_t i = 0; i < config.stages.size(); ++i) {
        const std::string& stage = config.stages[i];
        char prefix[8];
        std::snprintf(prefix, sizeof(prefix), "%02zu_", i + 1);
        const std::string ext = stage == "pack" ? ".windows.jsonl" : ".jsonl";
        const std::string out_path = args.out_path + "/" + prefix + stage + ext;
        sift::StageStats stats = sift::run_stage(stage, config, current_in, out_path);
        sift::write_stage_stats(stats, args.out_path + "/" + prefix + stage + ".stats.json");
        std::printf("%s: %llu -> %llu docs (kept %.2f%%)\n", stats.stage.c_str(),
                    static_cast<unsigned long long>(stats.docs_in),
                    static_cast<unsigned long long>(stats.docs_out), 100.0 * stats.kept_rate());
        all_stats.push_back(std::move(stats));
        if (stage != "pack") {
            current_in = out_path;
        }
    }
    const sift::RetentionReport report = sift::chain_report(all_stats);
    sift::write_report_json(report, args.out_path + "/report.json");
    const std::string table = sift::format_report_table(report);
    std::ofstream table_file(args.out_path + "/report.txt", std::ios::binary | std::ios::trunc);
    table_file << table;
    std::fputs(table.c_str(), stdout);
    return kExitOk;
}

int run_report(const std::vector<std::string>& stats_files, const std::string& out_path) {
    std::vector<sift::StageStats> stats;
    stats.reserve(stats_files.size());
    for (const std::string& path : stats_files) {
        stats.push_back(sift::read_stage_stats(path));
    }
    const sift::RetentionReport report = sift::chain_report(stats);
    if (!out_path.empty()) {
        sift::write_report_json(report, out_path);
    }
    std::fputs(sift::format_report_table(report).c_str(), stdout);
    return kExitOk;
}

sift::MagicTag parse_tag(const std::string& tag) {
    if (tag == "source") {
        return sift::MagicTag::Source;
    }
    if (tag == "target") {
        return sift::MagicTag::Target;
    }
    throw sift::ConfigError("tag must be \"source\" or \"target\"");
}

int mixture_fit_quadratic(const std::string& records_path, const std::string& prop_key,
                          const std::string& loss_key, const std::string& tag_name,
                          const std::string& out_path) {
    const auto records = sift::read_proxy_runs(records_path);
    const sift::MagicTag tag = parse_tag(tag_name);
    std::vector<std::pair<double, double>> points;
    points.reserve(records.size());
    for (const auto& record : records) {
        const auto prop = record.mixture.find(prop_key);
        const auto loss = record.losses.find(loss_key);
        if (prop == record.mixture.end() || loss == record.losses.end()) {
            throw std::invalid_argument("record missing mixture key \"" + prop_key +
                                        "\" or loss key \"" + loss_key + "\"");
        }
        points.emplace_back(sift::magic_metric(prop->second, record.learning_rate, tag),
                            loss->second);
    }
    sift::QuadraticFit fit = sift::fit_quadratic(points);
    fit.tag = tag;
    ordered_json j;
    j["a"] = fit.a;
    j["b"] = fit.b;
    j["c"] = fit.c;
    j["rss"] = fit.rss;
    j["tag"] = tag_name;
    j["x_min"] = fit.x_min;
    j["x_max"] = fit.x_max;
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out.is_open()) {
        throw sift::CorpusError("cannot open output file: " + out_path);
    }
    out << j.dump(2) << '\n';
    std::printf("quadratic fit over %zu runs: y = %.6g x^2 + %.6g x + %.6g (rss %.3g)\n",
                points.size(), fit.a, fit.b, fit.c, fit.rss);
    return kExitOk;
}

sift::QuadraticFit load_quadratic(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        throw sift::CorpusError("cannot open fit file: " + path);
    }
    const auto j = nlohmann::json::parse(in);
    sift::QuadraticFit fit;
    fit.a = j.at("a").get<double>();
    fit.b = j.at("b").get<double>();
    fit.c = j.at("c").get<double>();
    fit.rss = j.value("rss", 0.0);
    fit.tag = parse_tag(j.value("tag", "source"));
    fit.x_min = j.at("x_min").get<double>();
    fit.x_max = j.at("x_max").get<double>();
    return fit;
}

int mixture_boundary(const std::string& fit_path, double baseline, double delta,
                     const std::string& out_path) {
    const sift::QuadraticFit fit = load_quadratic(fit_path);
    const sift::BoundaryResult boundary = sift::estimate_boundary(fit, baseline, delta);
    ordered_json j;
    j["found"] = boundary.found;
    if (boundary.found) {
        j["boundary"] = boundary.boundary;
        j["upper"] = boundary.upper;
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        out << j.dump(2) << '\n';
    }
    if (boundary.found) {
        std::printf("loss stays within baseline%+.4g for metric in [%.6g, %.6g]\n", delta,
                    boundary.boundary, boundary.upper);
    } else {
        std::printf("no boundary in fitted range [%.6g, %.6g]\n", fit.x_min, fit.x_max);
    }
    return kExitOk;
}

int mixture_fit(const std::string& records_path, const std::string& target_name,
                bool lr_feature, const std::string& out_path) {
    const auto records = sift::read_proxy_runs(records_path);
    sift::SurrogateTarget target;
    if (target_name == "joint") {
        target = sift::SurrogateTarget::JointLoss;
    } else if (target_name == "log-joint") {
        target = sift::SurrogateTarget::LogJointLoss;
    } else {
        throw sift::ConfigError("target must be \"joint\" or \"log-joint\"");
    }
    const sift::SurrogateModel model = sift::fit_surrogate(records, target, lr_feature);
    ordered_json j;
    j["keys"] = model.keys;
    j["weights"] = model.weights;
    j["intercept"] = model.intercept;
    j["lr_weight"] = model.lr_weight;
    j["uses_lr_feature"] = model.uses_lr_feature;
    j["r2"] = model.r2;
    j["target"] = target_name;
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out.is_open()) {
        throw sift::CorpusError("cannot open output file: " + out_path);
    }
    out << j.dump(2) << '\n';
    std::printf("surrogate over %zu runs, %zu keys: R² = %.3f\n", records.size(),
                model.keys.size(), model.r2);
    return kExitOk;
}

int mixture_simulate(const std::string& model_path, std::size_t n, std::uint64_t seed,
                     std::size_t workers, const std::string& out_path) {
    std::ifstream in(model_path, std::ios::binary);
    if (!in.is_open()) {
        throw sift::CorpusError("cannot open model file: " + model_path);
    }
    const auto j = nlohmann::json::parse(in);
    sift::SurrogateModel model;
    model.keys = j.at("keys").get<std::vector<std::string>>();
    model.weights = j.at("weights").get<std::vector<double>>();
    model.intercept = j.value("intercept", 0.0);
    model.lr_weight = j.value("lr_weight", 0.0);
    model.uses_lr_feature = j.value("uses_lr_feature", false);
    const sift::SimulationResult result = sift::simulate(model, n, seed, workers);
    ordered_json out_json;
    out_json["mixture"] = result.best_mixture;
    out_json["predicted"] = result.predicted;
    out_json["samples"] = n;
    out_json["seed"] = seed;
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out.is_open()) {
        throw sift::CorpusError("cannot open output file: " + out_path);
    }
    out << out_json.dump(2) << '\n';
    std::printf("best of %zu samples: predicted %.6g\n", n, result.predicted);
    return kExitOk;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        throw sift::CorpusError("cannot open file: " + path);
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"textsift: multilingual corpus refinery and mixture lab"};
    app.require_subcommand(1);

    // --- pipeline stages ---
    std::map<std::string, StageArgs> stage_args;
    for (const std::string& stage : sift::kStageNames) {
        auto* cmd = app.add_subcommand(stage, "run the " + stage + " stage");
        add_stage_options(cmd, stage_args[stage]);
    }
    // dedup knobs from the command line
    StageArgs& dedup_args = stage_args["dedup"];
    auto* dedup_cmd = app.get_subcommand("dedup");
    double dedup_threshold = -1.0;
    std::int64_t dedup_num_perm = -1, dedup_chunk = -1, dedup_rounds = -1;
    bool dedup_verify = false;
    dedup_cmd->add_option("--threshold", dedup_threshold, "Jaccard similarity threshold");
    dedup_cmd->add_option("--num-perm", dedup_num_perm, "number of permutations");
    dedup_cmd->add_option("--chunk-size", dedup_chunk, "documents per chunk");
    dedup_cmd->add_option("--rounds", dedup_rounds, "dedup rounds");
    dedup_cmd->add_flag("--verify-estimates", dedup_verify,
                        "require estimate >= threshold for candidate pairs");

    StageArgs pipeline_args;
    auto* pipeline_cmd = app.add_subcommand("pipeline", "run the configured stage list");
    pipeline_cmd->add_option("--config", pipeline_args.config_path, "pipeline config JSON")
        ->required();
    pipeline_cmd->add_option("--in", pipeline_args.in_path, "input corpus")->required();
    pipeline_cmd->add_option("--out-dir", pipeline_args.out_path, "output directory")->required();
    pipeline_cmd->add_option("--seed", pipeline_args.seed_override, "override the global seed");
    pipeline_cmd->add_option("--workers", pipeline_args.workers_override, "worker thread count");

    std::vector<std::string> report_stats;
    std::string report_out;
    auto* report_cmd = app.add_subcommand("report", "retention report over stage stats files");
    report_cmd->add_option("--stats", report_stats, "stage stats files, in chain order")
        ->required();
    report_cmd->add_option("--out", report_out, "write report JSON here");

    // --- mixture lab ---
    auto* mixture_cmd = app.add_subcommand("mixture", "proxy-run regression tools");
    mixture_cmd->require_subcommand(1);

    std::string fq_records, fq_prop, fq_loss, fq_tag = "source", fq_out;
    auto* fq_cmd = mixture_cmd->add_subcommand("fit-quadratic",
                                               "fit loss vs the log-proportion/lr metric");
    fq_cmd->add_option("--records", fq_records, "proxy-run records (JSONL)")->required();
    fq_cmd->add_option("--prop-key", fq_prop, "mixture key for the proportion")->required();
    fq_cmd->add_option("--loss-key", fq_loss, "loss key to model")->required();
    fq_cmd->add_option("--tag", fq_tag, "source (ln p - ln lr) or target (ln p + ln lr)");
    fq_cmd->add_option("--out", fq_out, "coefficients JSON")->required();

    std::string bd_fit, bd_out;
    double bd_baseline = 0.0, bd_delta = 0.0;
    auto* bd_cmd = mixture_cmd->add_subcommand("boundary", "acceptable metric interval");
    bd_cmd->add_option("--fit", bd_fit, "coefficients JSON from fit-quadratic")->required();
    bd_cmd->add_option("--baseline", bd_baseline, "baseline loss")->required();
    bd_cmd->add_option("--delta", bd_delta, "acceptable deviation")->required();
    bd_cmd->add_option("--out", bd_out, "boundary report JSON");

    std::string fit_records, fit_target = "joint", fit_out;
    bool fit_lr_feature = false;
    auto* fit_cmd = mixture_cmd->add_subcommand("fit", "fit the mixture->joint-loss surrogate");
    fit_cmd->add_option("--records", fit_records, "proxy-run records (JSONL)")->required();
    fit_cmd->add_option("--target", fit_target, "joint or log-joint");
    fit_cmd->add_flag("--lr-feature", fit_lr_feature, "include ln(lr) as a feature");
    fit_cmd->add_option("--out", fit_out, "model JSON")->required();

    std::string sim_model, sim_out;
    std::size_t sim_n = 1000000;
    std::uint64_t sim_seed = 0;
    std::size_t sim_workers = 1;
    auto* sim_cmd = mixture_cmd->add_subcommand("simulate", "search random mixtures");
    sim_cmd->add_option("--model", sim_model, "model JSON from fit")->required();
    sim_cmd->add_option("--n", sim_n, "number of samples");
    sim_cmd->add_option("--seed", sim_seed, "simulation seed");
    sim_cmd->add_option("--workers", sim_workers, "worker thread count");
    sim_cmd->add_option("--out", sim_out, "best mixture JSON")->required();

    // --- scorer training helpers ---
    std::string lm_corpus, lm_out;
    std::size_t lm_order = 3;
    auto* lm_cmd = app.add_subcommand("train-lm", "train the built-in perplexity model");
    lm_cmd->add_option("--corpus", lm_corpus, "text file, one sequence per line")->required();
    lm_cmd->add_option("--order", lm_order, "ngram order");
    lm_cmd->add_option("--out", lm_out, "model file")->required();

    std::vector<std::string> li_corpora;
    std::string li_out;
    std::size_t li_order = 2;
    auto* li_cmd = app.add_subcommand("train-langid", "train the built-in language classifier");
    li_cmd->add_option("--corpus", li_corpora, "lang=path pairs, one per language")->required();
    li_cmd->add_option("--order", li_order, "character ngram order");
    li_cmd->add_option("--out", li_out, "model file")->required();

    std::string bpe_corpus, bpe_merges, bpe_vocab;
    std::size_t bpe_vocab_size = 4096;
    auto* bpe_cmd = app.add_subcommand("train-bpe", "train a byte-level BPE tokenizer");
    bpe_cmd->add_option("--corpus", bpe_corpus, "text file, one document per line")->required();
    bpe_cmd->add_option("--vocab-size", bpe_vocab_size, "target vocabulary size");
    bpe_cmd->add_option("--out-merges", bpe_merges, "merges file")->required();
    bpe_cmd->add_option("--out-vocab", bpe_vocab, "vocabulary file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        for (const std::string& stage : sift::kStageNames) {
            if (app.got_subcommand(stage)) {
                if (stage == "dedup") {
                    sift::PipelineConfig config = load_config(dedup_args);
                    if (dedup_threshold >= 0.0) config.dedup_threshold = dedup_threshold;
                    if (dedup_num_perm > 0) config.dedup_num_perm = dedup_num_perm;
                    if (dedup_chunk > 0) config.dedup_chunk_size = dedup_chunk;
                    if (dedup_rounds > 0) config.dedup_rounds = dedup_rounds;
                    if (dedup_verify) config.dedup_verify_estimates = true;
                    const sift::StageStats stats =
                        sift::run_stage("dedup", config, dedup_args.in_path, dedup_args.out_path);
                    sift::write_stage_stats(stats, dedup_args.out_path + ".stats.json");
                    std::printf("dedup: %llu -> %llu docs (kept %.2f%%)\n",
                                static_cast<unsigned long long>(stats.docs_in),
                                static_cast<unsigned long long>(stats.docs_out),
                                100.0 * stats.kept_rate());
                    return kExitOk;
                }
                return run_single_stage(stage, stage_args[stage]);
            }
        }
        if (app.got_subcommand("pipeline")) {
            return run_pipeline(pipeline_args);
        }
        if (app.got_subcommand("report")) {
            return run_report(report_stats, report_out);
        }
        if (app.got_subcommand("mixture")) {
            if (fq_cmd->parsed()) {
                return mixture_fit_quadratic(fq_records, fq_prop, fq_loss, fq_tag, fq_out);
            }
            if (bd_cmd->parsed()) {
                return mixture_boundary(bd_fit, bd_baseline, bd_delta, bd_out);
            }
            if (fit_cmd->parsed()) {
                return mixture_fit(fit_records, fit_target, fit_lr_feature, fit_out);
            }
            if (sim_cmd->parsed()) {
                return mixture_simulate(sim_model, sim_n, sim_seed, sim_workers, sim_out);
            }
        }
        if (app.got_subcommand("train-lm")) {
            const auto model = sift::NgramLanguageModel::train_from_lines(read_lines(lm_corpus),
                                                                          lm_order);
            model.save(lm_out);
            std::printf("trained order-%zu lm, vocab %zu\n", model.order(), model.vocab_size());
            return kExitOk;
        }
        if (app.got_subcommand("train-langid")) {
            std::map<std::string, std::vector<std::string>> corpora;
            for (const std::string& spec : li_corpora) {
                const std::size_t eq = spec.find('=');
                if (eq == std::string::npos) {
                    throw sift::ConfigError("--corpus expects lang=path, got: " + spec);
                }
                corpora[spec.substr(0, eq)] = read_lines(spec.substr(eq + 1));
            }
            const auto model = sift::LangIdModel::train(corpora, li_order);
            model.save(li_out);
            std::printf("trained langid over %zu classes\n", model.num_classes());
            return kExitOk;
        }
        if (app.got_subcommand("train-bpe")) {
            const auto model = sift::BpeModel::train(read_lines(bpe_corpus), bpe_vocab_size);
            model.save(bpe_merges, bpe_vocab);
            std::printf("trained BPE with %zu merges (vocab %zu)\n", model.num_merges(),
                        model.vocab_size());
            return kExitOk;
        }
    } catch (const sift::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const sift::CorpusError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "contract violation: %s\n", e.what());
        return kExitContract;
    } catch (const std::logic_error& e) {
        std::fprintf(stderr, "contract violation: %s\n", e.what());
        return kExitContract;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return kExitIo;
    }
    return kExitConfig;
}
