#include "textsift/pipeline.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "textsift/corpus_io.hpp"
#include "textsift/hash.hpp"
#include "textsift/lsh.hpp"
#include "textsift/utf8.hpp"

namespace sift {

const std::vector<std::string> kStageNames = {"normalize", "clean",      "dedup",
                                              "merge",     "codeswitch", "pack"};

namespace {

using nlohmann::json;

FilterConfig parse_filter_config(const json& j, const FilterConfig& base) {
    FilterConfig config = base;
    if (j.contains("min_length")) config.min_length = j["min_length"].get<std::uint64_t>();
    if (j.contains("max_length")) config.max_length = j["max_length"].get<std::uint64_t>();
    if (j.contains("char_rep_ngram")) config.char_rep_ngram = j["char_rep_ngram"].get<std::size_t>();
    if (j.contains("char_rep_threshold"))
        config.char_rep_threshold = j["char_rep_threshold"].get<double>();
    if (j.contains("word_rep_ngram")) config.word_rep_ngram = j["word_rep_ngram"].get<std::size_t>();
    if (j.contains("word_rep_threshold"))
        config.word_rep_threshold = j["word_rep_threshold"].get<double>();
    if (j.contains("special_chars")) {
        config.special_charset.clear();
        const std::string chars = j["special_chars"].get<std::string>();
        std::size_t pos = 0;
        while (pos < chars.size()) {
            config.special_charset.insert(utf8::decode(chars, pos));
        }
    }
    if (j.contains("special_threshold"))
        config.special_threshold = j["special_threshold"].get<double>();
    if (j.contains("stopwords_file")) config.stopwords = Lexicon::load(j["stopwords_file"]);
    if (j.contains("stopword_threshold"))
        config.stopword_threshold = j["stopword_threshold"].get<double>();
    if (j.contains("stopword_direction")) {
        const std::string direction = j["stopword_direction"].get<std::string>();
        if (direction == "above") {
            config.stopword_direction = ThresholdDirection::FailAbove;
        } else if (direction == "below") {
            config.stopword_direction = ThresholdDirection::FailBelow;
        } else {
            throw ConfigError("stopword_direction must be \"above\" or \"below\"");
        }
    }
    if (j.contains("flagged_file")) config.flagged = Lexicon::load(j["flagged_file"]);
    if (j.contains("flagged_threshold"))
        config.flagged_threshold = j["flagged_threshold"].get<double>();
    if (j.contains("langid_threshold"))
        config.langid_threshold = j["langid_threshold"].get<double>();
    if (j.contains("ppl_threshold")) config.ppl_threshold = j["ppl_threshold"].get<double>();
    return config;
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        throw ConfigError("cannot open config file: " + path);
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError("config parse failure: " + std::string(e.what()));
    }
    PipelineConfig config;
    try {
        config.seed = j.value("seed", 0ULL);
        config.workers = j.value("workers", 1ULL);
        config.strict = j.value("strict", true);

        if (j.contains("segment")) {
            const json& s = j["segment"];
            if (s.contains("char_chunk_langs")) {
                config.segmenter.char_chunk_langs.clear();
                for (const auto& lang : s["char_chunk_langs"]) {
                    config.segmenter.char_chunk_langs.insert(lang.get<std::string>());
                }
            }
            config.segmenter.chunk_size = s.value("chunk_size", config.segmenter.chunk_size);
        }
        if (j.contains("normalize")) {
            const json& n = j["normalize"];
            config.normalize.word_length_cutoff =
                n.value("word_length_cutoff", config.normalize.word_length_cutoff);
            config.normalize.strip_html = n.value("strip_html", true);
            config.normalize.strip_emoji = n.value("strip_emoji", true);
            config.normalize.fix_escapes = n.value("fix_escapes", true);
            if (n.contains("blocklist_file")) {
                config.normalize.blocklist = load_blocklist(n["blocklist_file"]);
            }
            if (n.contains("punct_map_file")) {
                config.normalize.punct_map = load_punct_map(n["punct_map_file"]);
            }
        }
        if (j.contains("clean")) {
            const json& c = j["clean"];
            config.use_sidecar = c.value("use_sidecar", true);
            if (c.contains("langid_model")) {
                config.langid_model_path = c["langid_model"].get<std::string>();
            }
            FilterConfig base;
            if (c.contains("default")) {
                base = parse_filter_config(c["default"], base);
                config.default_filter = base;
                if (c["default"].contains("lm")) {
                    config.lm_paths["*"] = c["default"]["lm"].get<std::string>();
                }
            }
            if (c.contains("per_lang")) {
                for (const auto& [lang, overrides] : c["per_lang"].items()) {
                    FilterConfig lang_config = parse_filter_config(overrides, base);
                    lang_config.lang = lang;
                    config.filters_by_lang[lang] = std::move(lang_config);
                    if (overrides.contains("lm")) {
                        config.lm_paths[lang] = overrides["lm"].get<std::string>();
                    }
                }
            }
        }
        if (j.contains("dedup")) {
            const json& d = j["dedup"];
            config.dedup_threshold = d.value("threshold", 0.7);
            config.dedup_num_perm = d.value("num_perm", 256ULL);
            config.dedup_bands = d.value("bands", 0ULL);
            config.dedup_rows = d.value("rows", 0ULL);
            config.dedup_chunk_size = d.value("chunk_size", 100000ULL);
            config.dedup_rounds = d.value("rounds", 3ULL);
            config.dedup_shingle_n = d.value("shingle_n", 5ULL);
            config.dedup_verify_estimates = d.value("verify_estimates", false);
        }
        if (j.contains("merge")) {
            const json& m = j["merge"];
            config.pack.merge_target = m.value("target_words", config.pack.merge_target);
            config.pack.merge_max_span = m.value("max_span", config.pack.merge_max_span);
        }
        if (j.contains("codeswitch")) {
            const json& c = j["codeswitch"];
            config.pack.cs_rate = c.value("rate", config.pack.cs_rate);
            if (c.contains("lexicons")) {
                for (const auto& [lang, file] : c["lexicons"].items()) {
                    config.cs_lexicon_paths[lang] = file.get<std::string>();
                }
            }
        }
        if (j.contains("pack")) {
            const json& p = j["pack"];
            config.pack.window = p.value("window", config.pack.window);
            config.pack.marker_id = p.value("marker_id", config.pack.marker_id);
            config.pack.dropout_p = p.value("dropout", config.pack.dropout_p);
            if (p.contains("mode")) {
                const std::string mode = p["mode"].get<std::string>();
                if (mode == "codeswitch") {
                    config.pack.mode = PackMode::Codeswitch;
                } else if (mode == "monolingual") {
                    config.pack.mode = PackMode::Monolingual;
                } else {
                    throw ConfigError("pack mode must be \"codeswitch\" or \"monolingual\"");
                }
            }
            if (p.contains("merges_file")) {
                config.bpe_merges_path = p["merges_file"].get<std::string>();
            }
            if (p.contains("vocab_file")) {
                config.bpe_vocab_path = p["vocab_file"].get<std::string>();
            }
        }
        if (j.contains("pipeline")) {
            for (const auto& stage : j["pipeline"]) {
                config.stages.push_back(stage.get<std::string>());
            }
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("config parse failure: " + std::string(e.what()));
    }
    for (const std::string& stage : config.stages) {
        if (std::find(kStageNames.begin(), kStageNames.end(), stage) == kStageNames.end()) {
            throw ConfigError("unknown pipeline stage: " + stage);
        }
    }
    return config;
}

namespace {

StageStats run_normalize(const PipelineConfig& config, const std::string& in_path,
                         const std::string& out_path) {
    CorpusReader reader(in_path, config.strict);
    CorpusWriter writer(out_path);
    StageStats stats;
    stats.stage = "normalize";
    std::uint64_t modified = 0;
    Document doc;
    while (reader.next(doc)) {
        ++stats.docs_in;
        stats.bytes_in += doc.text.size();
        if (normalize_document(doc, config.normalize)) {
            ++modified;
        }
        writer.write(doc);
    }
    writer.flush();
    stats.docs_out = writer.docs_written();
    stats.bytes_out = writer.bytes_written();
    stats.extras["docs_modified"] = modified;
    if (reader.stats().skipped > 0) {
        stats.extras["malformed_skipped"] = reader.stats().skipped;
    }
    return stats;
}

StageStats run_clean(const PipelineConfig& config, const std::string& in_path,
                     const std::string& out_path) {
    LangIdModel langid;
    bool have_langid = false;
    if (!config.langid_model_path.empty()) {
        langid = LangIdModel::load(config.langid_model_path);
        have_langid = true;
    }
    std::map<std::string, NgramLanguageModel> lms;
    for (const auto& [lang, path] : config.lm_paths) {
        lms[lang] = NgramLanguageModel::load(path);
    }
    CorpusReader reader(in_path, config.strict);
    CorpusWriter writer(out_path);
    StageStats stats;
    stats.stage = "clean";
    Document doc;
    while (reader.next(doc)) {
        ++stats.docs_in;
        stats.bytes_in += doc.text.size();
        const FilterConfig* filter = nullptr;
        const auto lang_it = config.filters_by_lang.find(doc.lang);
        if (lang_it != config.filters_by_lang.end()) {
            filter = &lang_it->second;
        } else if (config.default_filter) {
            filter = &*config.default_filter;
        }
        if (filter == nullptr) {
            writer.write(doc);  // no filters configured for this language
            continue;
        }
        FilterScorers scorers;
        scorers.use_sidecar = config.use_sidecar;
        scorers.langid = have_langid ? &langid : nullptr;
        auto lm_it = lms.find(doc.lang);
        if (lm_it == lms.end()) {
            lm_it = lms.find("*");
        }
        scorers.lm = lm_it != lms.end() ? &lm_it->second : nullptr;
        const FilterVerdict verdict = apply_filters(doc, *filter, scorers, config.segmenter);
        if (verdict.kept) {
            writer.write(doc);
        } else {
            ++stats.removal_breakdown[*verdict.failed_filter];
        }
    }
    writer.flush();
    stats.docs_out = writer.docs_written();
    stats.bytes_out = writer.bytes_written();
    if (reader.stats().skipped > 0) {
        stats.extras["malformed_skipped"] = reader.stats().skipped;
    }
    return stats;
}

StageStats run_dedup(const PipelineConfig& config, const std::string& in_path,
                     const std::string& out_path) {
    DedupConfig dedup;
    if (config.dedup_bands > 0 && config.dedup_rows > 0) {
        dedup.params.bands = config.dedup_bands;
        dedup.params.rows = config.dedup_rows;
        dedup.params.num_perm = config.dedup_num_perm;
        dedup.params.threshold = config.dedup_threshold;
    } else {
        dedup.params = make_lsh_params(config.dedup_threshold, config.dedup_num_perm);
    }
    dedup.chunk_size = config.dedup_chunk_size;
    dedup.rounds = config.dedup_rounds;
    dedup.shingle_n = config.dedup_shingle_n;
    dedup.verify_estimates = config.dedup_verify_estimates;
    dedup.seed = derive_seed(config.seed, "dedup");
    dedup.workers = config.workers;

    const std::vector<Document> corpus = read_corpus(in_path, config.strict);
    DedupResult result = dedup_corpus(corpus, dedup, config.segmenter);
    CorpusWriter writer(out_path);
    for (const Document& doc : result.kept) {
        writer.write(doc);
    }
    writer.flush();
    write_cluster_map(result, out_path + ".clusters.tsv");
    return result.stats;
}

StageStats run_merge(const PipelineConfig& config, const std::string& in_path,
                     const std::string& out_path) {
    const std::vector<Document> paragraphs = read_corpus(in_path, config.strict);
    PackConfig merge_config = config.pack;
    merge_config.seed = derive_seed(config.seed, "merge");
    const std::vector<Document> merged = merge_adjacent(paragraphs, merge_config);
    StageStats stats;
    stats.stage = "merge";
    stats.docs_in = paragraphs.size();
    for (const Document& doc : paragraphs) {
        stats.bytes_in += doc.text.size();
    }
    CorpusWriter writer(out_path);
    for (const Document& doc : merged) {
        writer.write(doc);
    }
    writer.flush();
    stats.docs_out = writer.docs_written();
    stats.bytes_out = writer.bytes_written();
    stats.removal_breakdown["merged_away"] = stats.docs_in - stats.docs_out;
    return stats;
}

StageStats run_codeswitch(const PipelineConfig& config, const std::string& in_path,
                          const std::string& out_path) {
    std::map<std::string, BilingualLexicon> lexicons;
    for (const auto& [lang, path] : config.cs_lexicon_paths) {
        lexicons[lang] = BilingualLexicon::load(path);
    }
    CorpusReader reader(in_path, config.strict);
    CorpusWriter writer(out_path);
    StageStats stats;
    stats.stage = "codeswitch";
    std::uint64_t replaced = 0;
    std::uint64_t doc_index = 0;
    Document doc;
    while (reader.next(doc)) {
        ++stats.docs_in;
        stats.bytes_in += doc.text.size();
        const auto lex_it = lexicons.find(doc.lang);
        if (lex_it != lexicons.end()) {
            replaced += word_code_switch(doc, lex_it->second, config.pack.cs_rate,
                                         derive_seed(config.seed, "codeswitch", doc_index));
        }
        writer.write(doc);
        ++doc_index;
    }
    writer.flush();
    stats.docs_out = writer.docs_written();
    stats.bytes_out = writer.bytes_written();
    stats.extras["words_replaced"] = replaced;
    return stats;
}

StageStats run_pack(const PipelineConfig& config, const std::string& in_path,
                    const std::string& out_path) {
    if (config.bpe_merges_path.empty() || config.bpe_vocab_path.empty()) {
        throw ConfigError("pack stage needs pack.merges_file and pack.vocab_file");
    }
    const BpeModel model = BpeModel::load(config.bpe_merges_path, config.bpe_vocab_path);
    const std::vector<Document> docs = read_corpus(in_path, config.strict);
    PackConfig pack_config = config.pack;
    pack_config.seed = derive_seed(config.seed, "pack");
    const PackResult result = pack_sequences(docs, model, pack_config);
    write_windows(result, out_path);
    StageStats stats;
    stats.stage = "pack";
    stats.docs_in = docs.size();
    stats.docs_out = docs.size();  // packing consumes every document
    for (const Document& doc : docs) {
        stats.bytes_in += doc.text.size();
    }
    std::uint64_t full = 0;
    std::uint64_t partial = 0;
    for (const PackedStream& stream : result.streams) {
        for (const PackedWindow& window : stream.windows) {
            (window.final_partial ? partial : full) += 1;
            stats.bytes_out += window.ids.size() * sizeof(std::uint32_t);
        }
    }
    stats.extras["windows_full"] = full;
    stats.extras["windows_partial"] = partial;
    stats.extras["tokens"] = result.total_tokens;
    return stats;
}

}  // namespace

StageStats run_stage(const std::string& stage, const PipelineConfig& config,
                     const std::string& in_path, const std::string& out_path) {
    if (stage == "normalize") return run_normalize(config, in_path, out_path);
    if (stage == "clean") return run_clean(config, in_path, out_path);
    if (stage == "dedup") return run_dedup(config, in_path, out_path);
    if (stage == "merge") return run_merge(config, in_path, out_path);
    if (stage == "codeswitch") return run_codeswitch(config, in_path, out_path);
    if (stage == "pack") return run_pack(config, in_path, out_path);
    throw ConfigError("unknown stage: " + stage);
}

}  // namespace sift
