#pragma once

#include <istream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "textsift/document.hpp"

namespace sift {

class CorpusError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ReadStats {
    std::uint64_t docs = 0;
    std::uint64_t bytes = 0;       // bytes of document text
    std::uint64_t skipped = 0;     // malformed lines skipped in lenient mode
};

// Streams one JSONL corpus file. In strict mode a malformed line raises
// CorpusError naming the line number; in lenient mode it is counted and
// skipped.
class CorpusReader {
  public:
    explicit CorpusReader(const std::string& path, bool strict = true);

    // Returns false at end of stream.
    bool next(Document& doc);

    const ReadStats& stats() const { return stats_; }

  private:
    std::string path_;
    bool strict_;
    std::unique_ptr<std::istream> in_;
    std::uint64_t line_no_ = 0;
    ReadStats stats_;
};

// Writes documents one JSON record per line with fixed field order
// (id, lang, source, text, meta). read_corpus(write_corpus(S)) == S.
class CorpusWriter {
  public:
    explicit CorpusWriter(const std::string& path);

    void write(const Document& doc);
    void flush();

    std::uint64_t docs_written() const { return docs_; }
    std::uint64_t bytes_written() const { return bytes_; }

  private:
    std::unique_ptr<std::ostream> out_;
    std::string path_;
    std::uint64_t docs_ = 0;
    std::uint64_t bytes_ = 0;
};

// Whole-file helpers for small corpora and tests.
std::vector<Document> read_corpus(const std::string& path, bool strict = true);
StageStats write_corpus(const std::vector<Document>& docs, const std::string& path,
                        const std::string& stage = "write");

std::string serialize_document(const Document& doc);
Document parse_document(const std::string& line, std::uint64_t line_no = 0);

// Stage stats <-> JSON file.
void write_stage_stats(const StageStats& stats, const std::string& path);
StageStats read_stage_stats(const std::string& path);

}  // namespace sift
