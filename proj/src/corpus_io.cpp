#include "textsift/corpus_io.hpp"

#include <fstream>
#include <memory>

#include <json.hpp>

namespace sift {

using ordered_json = nlohmann::ordered_json;

std::string serialize_document(const Document& doc) {
    ordered_json j;
    j["id"] = doc.id;
    j["lang"] = doc.lang;
    j["source"] = doc.source;
    j["text"] = doc.text;
    if (!doc.meta.empty()) {
        ordered_json m = ordered_json::object();
        for (const auto& [k, v] : doc.meta) {
            m[k] = v;
        }
        j["meta"] = m;
    }
    return j.dump();
}

Document parse_document(const std::string& line, std::uint64_t line_no) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const std::exception& e) {
        throw CorpusError("line " + std::to_string(line_no) + ": invalid record: " + e.what());
    }
    if (!j.is_object()) {
        throw CorpusError("line " + std::to_string(line_no) + ": record is not an object");
    }
    Document doc;
    for (const char* field : {"id", "lang", "source", "text"}) {
        if (!j.contains(field) || !j[field].is_string()) {
            throw CorpusError("line " + std::to_string(line_no) + ": missing required field \"" +
                              field + "\"");
        }
    }
    doc.id = j["id"].get<std::string>();
    doc.lang = j["lang"].get<std::string>();
    doc.source = j["source"].get<std::string>();
    doc.text = j["text"].get<std::string>();
    if (doc.id.empty()) {
        throw CorpusError("line " + std::to_string(line_no) + ": empty id");
    }
    if (j.contains("meta")) {
        if (!j["meta"].is_object()) {
            throw CorpusError("line " + std::to_string(line_no) + ": meta is not an object");
        }
        for (const auto& [k, v] : j["meta"].items()) {
            doc.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
    }
    return doc;
}

CorpusReader::CorpusReader(const std::string& path, bool strict)
    : path_(path), strict_(strict) {
    auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!file->is_open()) {
        throw CorpusError("cannot open corpus file: " + path);
    }
    in_ = std::move(file);
}

bool CorpusReader::next(Document& doc) {
    std::string line;
    while (std::getline(*in_, line)) {
        ++line_no_;
        if (line.empty()) {
            continue;
        }
        try {
            doc = parse_document(line, line_no_);
        } catch (const CorpusError&) {
            if (strict_) {
                throw;
            }
            ++stats_.skipped;
            continue;
        }
        ++stats_.docs;
        stats_.bytes += doc.text.size();
        return true;
    }
    return false;
}

CorpusWriter::CorpusWriter(const std::string& path) : path_(path) {
    auto file = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!file->is_open()) {
        throw CorpusError("cannot open corpus file for writing: " + path);
    }
    out_ = std::move(file);
}

void CorpusWriter::write(const Document& doc) {
    *out_ << serialize_document(doc) << '\n';
    if (!*out_) {
        throw CorpusError("write failure: " + path_);
    }
    ++docs_;
    bytes_ += doc.text.size();
}

void CorpusWriter::flush() {
    out_->flush();
    if (!*out_) {
        throw CorpusError("write failure: " + path_);
    }
}

std::vector<Document> read_corpus(const std::string& path, bool strict) {
    CorpusReader reader(path, strict);
    std::vector<Document> docs;
    Document doc;
    while (reader.next(doc)) {
        docs.push_back(std::move(doc));
    }
    return docs;
}

StageStats write_corpus(const std::vector<Document>& docs, const std::string& path,
                        const std::string& stage) {
    CorpusWriter writer(path);
    StageStats stats;
    stats.stage = stage;
    for (const Document& doc : docs) {
        writer.write(doc);
        ++stats.docs_in;
        stats.bytes_in += doc.text.size();
    }
    writer.flush();
    stats.docs_out = writer.docs_written();
    stats.bytes_out = writer.bytes_written();
    return stats;
}

void write_stage_stats(const StageStats& stats, const std::string& path) {
    ordered_json j;
    j["stage"] = stats.stage;
    j["docs_in"] = stats.docs_in;
    j["docs_out"] = stats.docs_out;
    j["bytes_in"] = stats.bytes_in;
    j["bytes_out"] = stats.bytes_out;
    j["kept_rate"] = stats.kept_rate();
    j["removal_rate"] = stats.removal_rate();
    j["removal_breakdown"] = stats.removal_breakdown;
    if (!stats.extras.empty()) {
        j["extras"] = stats.extras;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.is_open()) {
        throw CorpusError("cannot open stats file for writing: " + path);
    }
    out << j.dump(2) << '\n';
}

StageStats read_stage_stats(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        throw CorpusError("cannot open stats file: " + path);
    }
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw CorpusError("invalid stats file " + path + ": " + e.what());
    }
    StageStats stats;
    stats.stage = j.value("stage", "");
    stats.docs_in = j.value("docs_in", 0ULL);
    stats.docs_out = j.value("docs_out", 0ULL);
    stats.bytes_in = j.value("bytes_in", 0ULL);
    stats.bytes_out = j.value("bytes_out", 0ULL);
    if (j.contains("removal_breakdown")) {
        for (const auto& [k, v] : j["removal_breakdown"].items()) {
            stats.removal_breakdown[k] = v.get<std::uint64_t>();
        }
    }
    if (j.contains("extras")) {
        for (const auto& [k, v] : j["extras"].items()) {
            stats.extras[k] = v.get<std::uint64_t>();
        }
    }
    return stats;
}

}  // namespace sift
