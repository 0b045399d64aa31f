#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "textsift/corpus_io.hpp"
#include "textsift/pipeline.hpp"

namespace fs = std::filesystem;
using namespace sift;

namespace {

fs::path workdir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("textsift_pipe_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

}  // namespace

TEST_CASE("config loader rejects bad input") {
    const fs::path dir = workdir("cfg");
    CHECK_THROWS_AS(PipelineConfig::load((dir / "missing.json").string()), ConfigError);

    write_file(dir / "broken.json", "{not json");
    CHECK_THROWS_AS(PipelineConfig::load((dir / "broken.json").string()), ConfigError);

    write_file(dir / "badstage.json", R"({"pipeline": ["normalize", "frobnicate"]})");
    CHECK_THROWS_AS(PipelineConfig::load((dir / "badstage.json").string()), ConfigError);

    write_file(dir / "baddir.json", R"({"clean": {"default": {"stopword_direction": "up"}}})");
    CHECK_THROWS_AS(PipelineConfig::load((dir / "baddir.json").string()), ConfigError);
}

TEST_CASE("clean stage resolves per-language filters and sidecar scores") {
    const fs::path dir = workdir("clean");
    std::vector<Document> corpus = {
        // Passes the id override; the sidecar perplexity is low.
        {"keep", "id", "cc", "lima kata dalam kalimat ini ya", {{"ppl", "50"}}},
        // Too short for the id override (min 5), long enough for default.
        {"short_id", "id", "cc", "tiga kata saja", {{"ppl", "50"}}},
        // Other language: default applies (min 2, no ppl) so it stays.
        {"short_vi", "vi", "cc", "hai tu", {}},
        // Sidecar perplexity above the threshold.
        {"ppl_high", "id", "cc", "enam kata dalam kalimat ini ya", {{"ppl", "9000"}}},
    };
    write_corpus(corpus, (dir / "in.jsonl").string());
    nlohmann::json cfg;
    cfg["seed"] = 1;
    cfg["clean"] = {
        {"default", {{"min_length", 2}}},
        {"per_lang", {{"id", {{"min_length", 5}, {"ppl_threshold", 100.0}}}}},
    };
    write_file(dir / "cfg.json", cfg.dump());

    const PipelineConfig config = PipelineConfig::load((dir / "cfg.json").string());
    const StageStats stats =
        run_stage("clean", config, (dir / "in.jsonl").string(), (dir / "out.jsonl").string());
    CHECK(stats.docs_in == 4);
    CHECK(stats.docs_out == 2);
    CHECK(stats.removal_breakdown.at("word_count") == 1);
    CHECK(stats.removal_breakdown.at("perplexity") == 1);
    // Breakdown accounts for exactly the removed documents.
    std::uint64_t removed = 0;
    for (const auto& [name, count] : stats.removal_breakdown) {
        removed += count;
    }
    CHECK(removed == stats.docs_in - stats.docs_out);

    const auto kept = read_corpus((dir / "out.jsonl").string());
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].id == "keep");
    CHECK(kept[1].id == "short_vi");
    // Sidecar meta rides through untouched on kept docs.
    CHECK(kept[0].meta.at("ppl") == "50");
}

TEST_CASE("merge stage stats satisfy the breakdown invariant") {
    const fs::path dir = workdir("merge");
    std::vector<Document> corpus;
    for (int i = 0; i < 9; ++i) {
        corpus.push_back({"p" + std::to_string(i), "id", "cc", "kata nomor " +
                          std::to_string(i), {}});
    }
    write_corpus(corpus, (dir / "in.jsonl").string());
    write_file(dir / "cfg.json", R"({"seed": 3, "merge": {"target_words": 50, "max_span": 3}})");
    const PipelineConfig config = PipelineConfig::load((dir / "cfg.json").string());
    const StageStats stats =
        run_stage("merge", config, (dir / "in.jsonl").string(), (dir / "out.jsonl").string());
    CHECK(stats.docs_in == 9);
    CHECK(stats.docs_out <= 9);
    CHECK(stats.removal_breakdown.at("merged_away") == stats.docs_in - stats.docs_out);
}

TEST_CASE("unknown stage raises a config error") {
    PipelineConfig config;
    CHECK_THROWS_AS(run_stage("frobnicate", config, "in", "out"), ConfigError);
}
