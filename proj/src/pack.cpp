#include "textsift/pack.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>

#include <json.hpp>

#include "textsift/hash.hpp"
#include "textsift/segment.hpp"

namespace sift {

BilingualLexicon BilingualLexicon::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        throw std::runtime_error("cannot open lexicon file: " + path);
    }
    BilingualLexicon lex;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
            throw std::runtime_error("lexicon line " + std::to_string(line_no) +
                                     ": expected source<TAB>phrase");
        }
        std::string key = line.substr(0, tab);
        for (char& c : key) {
            if (c >= 'A' && c <= 'Z') {
                c += 'a' - 'A';
            }
        }
        lex.entries[key] = line.substr(tab + 1);
    }
    return lex;
}

namespace {

std::vector<Document> merge_core(const std::vector<Document>& paragraphs,
                                 std::size_t merge_target,
                                 const std::function<std::size_t()>& next_span) {
    std::vector<Document> out;
    std::size_t i = 0;
    while (i < paragraphs.size()) {
        const std::size_t span_limit = std::max<std::size_t>(1, next_span());
        Document merged = paragraphs[i];
        std::size_t words = split_whitespace(merged.text).size();
        std::size_t span = 1;
        ++i;
        while (i < paragraphs.size() && span < span_limit && words < merge_target &&
               paragraphs[i].lang == merged.lang && paragraphs[i].source == merged.source) {
            merged.text += '\n';
            merged.text += paragraphs[i].text;
            words += split_whitespace(paragraphs[i].text).size();
            ++span;
            ++i;
        }
        out.push_back(std::move(merged));
    }
    return out;
}

}  // namespace

std::vector<Document> merge_with_spans(const std::vector<Document>& paragraphs,
                                       const std::vector<std::size_t>& spans,
                                       std::size_t merge_target) {
    std::size_t cursor = 0;
    return merge_core(paragraphs, merge_target, [&]() -> std::size_t {
        return cursor < spans.size() ? spans[cursor++] : 1;
    });
}

std::vector<Document> merge_adjacent(const std::vector<Document>& paragraphs,
                                     const PackConfig& config) {
    if (config.merge_max_span < 1) {
        throw std::invalid_argument("merge_max_span must be >= 1");
    }
    Rng rng(derive_seed(config.seed, "merge_spans"));
    return merge_core(paragraphs, config.merge_target, [&]() -> std::size_t {
        return 1 + static_cast<std::size_t>(rng.next_below(config.merge_max_span));
    });
}

std::size_t word_code_switch(Document& doc, const BilingualLexicon& lexicon, double cs_rate,
                             std::uint64_t seed) {
    if (cs_rate < 0.0 || cs_rate > 1.0) {
        throw std::invalid_argument("cs_rate must be in [0,1]");
    }
    if (cs_rate == 0.0 || lexicon.entries.empty()) {
        return 0;
    }
    Rng rng(seed);
    std::string out;
    out.reserve(doc.text.size());
    std::size_t replaced = 0;
    const std::string& text = doc.text;
    std::size_t pos = 0;
    while (pos < text.size()) {
        if (text[pos] == ' ' || text[pos] == '\n') {
            out.push_back(text[pos++]);
            continue;
        }
        const std::size_t start = pos;
        while (pos < text.size() && text[pos] != ' ' && text[pos] != '\n') {
            ++pos;
        }
        std::string word(text, start, pos - start);
        std::string folded = word;
        for (char& c : folded) {
            if (c >= 'A' && c <= 'Z') {
                c += 'a' - 'A';
            }
        }
        const auto hit = lexicon.entries.find(folded);
        if (hit != lexicon.entries.end() && rng.bernoulli(cs_rate)) {
            out += hit->second;
            ++replaced;
        } else {
            out += word;
        }
    }
    doc.text = std::move(out);
    return replaced;
}

PackResult pack_sequences(const std::vector<Document>& docs, const BpeModel& model,
                          const PackConfig& config) {
    if (config.window < 1) {
        throw std::invalid_argument("window must be >= 1");
    }
    PackResult result;
    result.window = config.window;
    result.marker_id = config.marker_id >= 0 ? static_cast<std::uint32_t>(config.marker_id)
                                             : static_cast<std::uint32_t>(model.vocab_size());
    result.tokenizer_fingerprint = model.fingerprint();

    // Build the document order per stream.
    std::vector<std::pair<std::string, std::vector<std::size_t>>> stream_docs;
    if (config.mode == PackMode::Codeswitch) {
        std::vector<std::size_t> order(docs.size());
        for (std::size_t i = 0; i < docs.size(); ++i) {
            order[i] = i;
        }
        Rng rng(derive_seed(config.seed, "pack_shuffle"));
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.next_below(i)]);
        }
        stream_docs.emplace_back("*", std::move(order));
    } else {
        std::map<std::string, std::vector<std::size_t>> by_lang;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            by_lang[docs[i].lang].push_back(i);
        }
        for (auto& [lang, order] : by_lang) {
            stream_docs.emplace_back(lang, std::move(order));
        }
    }

    for (auto& [lang, order] : stream_docs) {
        PackedStream stream;
        stream.lang = lang;
        PackedWindow current;
        current.ids.reserve(config.window);
        const auto emit_token = [&](std::uint32_t id, const std::string& doc_lang) {
            current.ids.push_back(id);
            current.langs.insert(doc_lang);
            ++result.total_tokens;
            if (current.ids.size() == config.window) {
                stream.windows.push_back(std::move(current));
                current = PackedWindow{};
                current.ids.reserve(config.window);
            }
        };
        for (std::size_t doc_index : order) {
            SegmentationOptions options;
            options.dropout_p = config.dropout_p;
            options.seed = derive_seed(config.seed, "pack_tokenize", doc_index);
            for (std::uint32_t id : model.segment(docs[doc_index].text, options)) {
                emit_token(id, docs[doc_index].lang);
            }
            emit_token(result.marker_id, docs[doc_index].lang);
        }
        if (!current.ids.empty()) {
            current.final_partial = true;
            stream.windows.push_back(std::move(current));
        }
        result.streams.push_back(std::move(stream));
    }
    return result;
}

void write_windows(const PackResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.is_open()) {
        throw std::runtime_error("cannot open windows file for writing: " + path);
    }
    nlohmann::ordered_json header;
    header["window"] = result.window;
    header["marker_id"] = result.marker_id;
    char fp[17];
    std::snprintf(fp, sizeof(fp), "%016llx",
                  static_cast<unsigned long long>(result.tokenizer_fingerprint));
    header["tokenizer_fingerprint"] = fp;
    header["streams"] = result.streams.size();
    out << header.dump() << '\n';
    for (const PackedStream& stream : result.streams) {
        nlohmann::ordered_json s;
        s["stream"] = stream.lang;
        s["windows"] = stream.windows.size();
        out << s.dump() << '\n';
        for (const PackedWindow& window : stream.windows) {
            nlohmann::ordered_json w;
            w["ids"] = window.ids;
            w["final"] = window.final_partial;
            w["langs"] = window.langs;
            out << w.dump() << '\n';
        }
    }
}

PackResult read_windows(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        throw std::runtime_error("cannot open windows file: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty windows file: " + path);
    }
    const auto header = nlohmann::json::parse(line);
    PackResult result;
    result.window = header.at("window").get<std::size_t>();
    result.marker_id = header.at("marker_id").get<std::uint32_t>();
    result.tokenizer_fingerprint =
        std::stoull(header.at("tokenizer_fingerprint").get<std::string>(), nullptr, 16);
    const auto num_streams = header.at("streams").get<std::size_t>();
    for (std::size_t s = 0; s < num_streams; ++s) {
        if (!std::getline(in, line)) {
            throw std::runtime_error("truncated windows file: " + path);
        }
        const auto stream_header = nlohmann::json::parse(line);
        PackedStream stream;
        stream.lang = stream_header.at("stream").get<std::string>();
        const auto num_windows = stream_header.at("windows").get<std::size_t>();
        for (std::size_t w = 0; w < num_windows; ++w) {
            if (!std::getline(in, line)) {
                throw std::runtime_error("truncated windows file: " + path);
            }
            const auto rec = nlohmann::json::parse(line);
            PackedWindow window;
            window.ids = rec.at("ids").get<std::vector<std::uint32_t>>();
            window.final_partial = rec.at("final").get<bool>();
            for (const auto& lang : rec.at("langs")) {
                window.langs.insert(lang.get<std::string>());
            }
            result.total_tokens += window.ids.size();
            stream.windows.push_back(std::move(window));
        }
        result.streams.push_back(std::move(stream));
    }
    return result;
}

std::vector<std::string> unpack_documents(const PackResult& result, const BpeModel& model) {
    std::vector<std::string> docs;
    for (const PackedStream& stream : result.streams) {
        std::vector<std::uint32_t> segment;
        for (const PackedWindow& window : stream.windows) {
            for (std::uint32_t id : window.ids) {
                if (id == result.marker_id) {
                    docs.push_back(model.detokenize(segment));
                    segment.clear();
                } else {
                    segment.push_back(id);
                }
            }
        }
        if (!segment.empty()) {
            docs.push_back(model.detokenize(segment));
        }
    }
    return docs;
}

}  // namespace sift
