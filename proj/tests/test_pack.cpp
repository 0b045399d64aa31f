#include <doctest.h>

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "textsift/hash.hpp"
#include "textsift/pack.hpp"
#include "textsift/segment.hpp"

using namespace sift;

namespace {

Document para(const std::string& id, const std::string& text, const std::string& lang = "id",
              const std::string& source = "cc") {
    return Document{id, lang, source, text, {}};
}

BpeModel tiny_model() {
    std::vector<std::string> corpus;
    for (int i = 0; i < 4; ++i) {
        corpus.push_back("kata satu dua tiga empat lima enam tujuh");
        corpus.push_back("the quick brown fox jumps over the dog");
        corpus.push_back("xin chao the gioi hom nay dep troi");
    }
    return BpeModel::train(corpus, 300);
}

}  // namespace

TEST_CASE("merge_with_spans forces exact grouping") {
    const std::vector<Document> paragraphs = {para("p1", "a b"), para("p2", "c d"),
                                              para("p3", "e f"), para("p4", "g h")};
    const auto merged = merge_with_spans(paragraphs, {2, 2}, /*merge_target=*/1000);
    REQUIRE(merged.size() == 2);
    CHECK(merged[0].text == "a b\nc d");
    CHECK(merged[1].text == "e f\ng h");
    CHECK(merged[0].id == "p1");
    CHECK(merged[1].id == "p3");
}

TEST_CASE("a single paragraph passes through unchanged") {
    const auto merged = merge_with_spans({para("p1", "solo text")}, {3}, 1000);
    REQUIRE(merged.size() == 1);
    CHECK(merged[0].text == "solo text");
}

TEST_CASE("merge_adjacent preserves content and order for random inputs") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Document> paragraphs;
        std::string expected;
        const std::size_t n = 1 + rng.next_below(30);
        for (std::size_t i = 0; i < n; ++i) {
            std::string text;
            const std::size_t words = 1 + rng.next_below(12);
            for (std::size_t w = 0; w < words; ++w) {
                if (w > 0) {
                    text += ' ';
                }
                text += "w" + std::to_string(rng.next_below(100));
            }
            expected += text;
            paragraphs.push_back(para("p" + std::to_string(i), text));
        }
        PackConfig config;
        config.merge_target = 20;
        config.merge_max_span = 4;
        config.seed = rng.next_u64();
        const auto merged = merge_adjacent(paragraphs, config);
        std::string actual;
        for (const Document& doc : merged) {
            for (char c : doc.text) {
                if (c != '\n') {
                    actual += c;
                }
            }
        }
        CHECK(actual == expected);  // newline joins are the only change
        CHECK(merged.size() <= paragraphs.size());
    }
}

TEST_CASE("merge_adjacent respects the word-count target") {
    std::vector<Document> paragraphs;
    for (int i = 0; i < 10; ++i) {
        paragraphs.push_back(para("p" + std::to_string(i), "one two three four five"));
    }
    PackConfig config;
    config.merge_target = 5;  // every paragraph already reaches the target
    config.merge_max_span = 8;
    config.seed = 1;
    CHECK(merge_adjacent(paragraphs, config).size() == paragraphs.size());
}

TEST_CASE("merge_adjacent never crosses lang or source boundaries") {
    std::vector<Document> paragraphs = {para("a1", "x", "id"), para("a2", "y", "id"),
                                        para("b1", "z", "th"), para("b2", "w", "th")};
    PackConfig config;
    config.merge_target = 100;
    config.merge_max_span = 4;
    config.seed = 2;
    for (const Document& doc : merge_adjacent(paragraphs, config)) {
        if (doc.id == "a1") {
            CHECK(doc.lang == "id");
            CHECK(doc.text.find('z') == std::string::npos);
        }
        if (doc.id == "b1") {
            CHECK(doc.lang == "th");
            CHECK(doc.text.find('x') == std::string::npos);
        }
    }
}

TEST_CASE("word_code_switch rate endpoints") {
    BilingualLexicon lexicon;
    lexicon.entries = {{"kucing", "cat"}, {"anjing", "dog"}, {"rumah", "house"}};

    Document doc = para("d", "kucing dan anjing di rumah");
    CHECK(word_code_switch(doc, lexicon, 0.0, 7) == 0);
    CHECK(doc.text == "kucing dan anjing di rumah");

    CHECK(word_code_switch(doc, lexicon, 1.0, 7) == 3);
    CHECK(doc.text == "cat dan dog di house");
}

TEST_CASE("word_code_switch replacement rate concentrates at cs_rate") {
    BilingualLexicon lexicon;
    lexicon.entries = {{"kata", "word"}};
    std::string text;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        if (i > 0) {
            text += ' ';
        }
        text += "kata";
    }
    Document doc = para("big", text);
    const std::size_t replaced = word_code_switch(doc, lexicon, 0.10, 12345);
    const double rate = static_cast<double>(replaced) / n;
    CHECK(rate == doctest::Approx(0.10).epsilon(0.05));  // 0.10 +/- 0.005
}

TEST_CASE("single-word lexicon keeps the word count invariant") {
    BilingualLexicon lexicon;
    lexicon.entries = {{"satu", "one"}, {"dua", "two"}};
    Document doc = para("d", "satu dua tiga empat satu dua");
    const std::size_t before = split_whitespace(doc.text).size();
    word_code_switch(doc, lexicon, 0.7, 5);
    CHECK(split_whitespace(doc.text).size() == before);
}

TEST_CASE("multi-word phrases may grow the word count") {
    BilingualLexicon lexicon;
    lexicon.entries = {{"kadang", "now and then"}};
    Document doc = para("d", "kadang hujan");
    word_code_switch(doc, lexicon, 1.0, 5);
    CHECK(doc.text == "now and then hujan");
    CHECK(split_whitespace(doc.text).size() == 4);
}

TEST_CASE("pack emits exact windows and round-trips content") {
    const BpeModel model = tiny_model();
    std::vector<Document> docs;
    Rng rng(77);
    std::vector<std::string> langs = {"id", "th", "vi"};
    for (int i = 0; i < 40; ++i) {
        std::string text;
        const std::size_t words = 5 + rng.next_below(30);
        for (std::size_t w = 0; w < words; ++w) {
            if (w > 0) {
                text += ' ';
            }
            text += "kata" + std::to_string(rng.next_below(50));
        }
        docs.push_back(para("d" + std::to_string(i), text, langs[i % langs.size()]));
    }
    PackConfig config;
    config.window = 64;
    config.mode = PackMode::Codeswitch;
    config.seed = 9;
    const PackResult result = pack_sequences(docs, model, config);
    REQUIRE(result.streams.size() == 1);

    for (std::size_t w = 0; w < result.streams[0].windows.size(); ++w) {
        const PackedWindow& window = result.streams[0].windows[w];
        if (!window.final_partial) {
            CHECK(window.ids.size() == config.window);
        } else {
            CHECK(w == result.streams[0].windows.size() - 1);
        }
    }

    // Content preservation: unpacked documents equal the shuffled stream.
    const std::vector<std::string> unpacked = unpack_documents(result, model);
    REQUIRE(unpacked.size() == docs.size());
    std::multiset<std::string> original_texts, unpacked_texts(unpacked.begin(), unpacked.end());
    for (const Document& doc : docs) {
        original_texts.insert(doc.text);
    }
    CHECK(original_texts == unpacked_texts);

    // With many short multilingual docs, some window must mix languages.
    bool mixed = false;
    for (const PackedWindow& window : result.streams[0].windows) {
        if (window.langs.size() >= 2) {
            mixed = true;
        }
    }
    CHECK(mixed);
}

TEST_CASE("doc of window-1 tokens fills exactly one window with its marker") {
    const BpeModel model = tiny_model();
    // Build a text whose greedy tokenization is window-1 ids long.
    PackConfig config;
    config.mode = PackMode::Monolingual;
    config.seed = 0;
    std::string text = "kata satu dua tiga";
    std::size_t tokens = model.segment(text).size();
    config.window = tokens + 1;
    const PackResult result = pack_sequences({para("d0", text)}, model, config);
    REQUIRE(result.streams.size() == 1);
    REQUIRE(result.streams[0].windows.size() == 1);
    CHECK(result.streams[0].windows[0].ids.size() == config.window);
    CHECK_FALSE(result.streams[0].windows[0].final_partial);
    CHECK(result.streams[0].windows[0].ids.back() == result.marker_id);
}

TEST_CASE("monolingual mode never mixes languages in a window") {
    const BpeModel model = tiny_model();
    std::vector<Document> docs;
    for (int i = 0; i < 30; ++i) {
        docs.push_back(para("i" + std::to_string(i), "kata satu dua tiga empat", "id"));
        docs.push_back(para("t" + std::to_string(i), "the quick brown fox", "en"));
    }
    PackConfig config;
    config.window = 32;
    config.mode = PackMode::Monolingual;
    config.seed = 4;
    const PackResult result = pack_sequences(docs, model, config);
    REQUIRE(result.streams.size() == 2);
    for (const PackedStream& stream : result.streams) {
        for (const PackedWindow& window : stream.windows) {
            CHECK(window.langs.size() == 1);
            CHECK(*window.langs.begin() == stream.lang);
        }
    }
}

TEST_CASE("windows file round-trips") {
    const BpeModel model = tiny_model();
    std::vector<Document> docs = {para("a", "kata satu dua"), para("b", "tiga empat lima")};
    PackConfig config;
    config.window = 16;
    config.seed = 3;
    const PackResult result = pack_sequences(docs, model, config);
    const std::string path =
        (std::filesystem::temp_directory_path() / "textsift_windows.jsonl").string();
    write_windows(result, path);
    const PackResult back = read_windows(path);
    CHECK(back.window == result.window);
    CHECK(back.marker_id == result.marker_id);
    CHECK(back.tokenizer_fingerprint == result.tokenizer_fingerprint);
    REQUIRE(back.streams.size() == result.streams.size());
    for (std::size_t s = 0; s < back.streams.size(); ++s) {
        REQUIRE(back.streams[s].windows.size() == result.streams[s].windows.size());
        for (std::size_t w = 0; w < back.streams[s].windows.size(); ++w) {
            CHECK(back.streams[s].windows[w].ids == result.streams[s].windows[w].ids);
            CHECK(back.streams[s].windows[w].langs == result.streams[s].windows[w].langs);
        }
    }
}

TEST_CASE("packing with dropout still round-trips content") {
    const BpeModel model = tiny_model();
    std::vector<Document> docs = {para("a", "kata satu dua tiga empat"),
                                  para("b", "the quick brown fox")};
    PackConfig config;
    config.window = 32;
    config.dropout_p = 0.5;
    config.seed = 21;
    config.mode = PackMode::Monolingual;
    const PackResult result = pack_sequences(docs, model, config);
    const auto unpacked = unpack_documents(result, model);
    std::multiset<std::string> expected, actual(unpacked.begin(), unpacked.end());
    for (const Document& doc : docs) {
        expected.insert(doc.text);
    }
    CHECK(expected == actual);
}
