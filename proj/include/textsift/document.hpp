#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace sift {

// One corpus record. `meta` carries stage annotations and external sidecar
// scores; unknown keys are preserved verbatim through every stage.
struct Document {
    std::string id;
    std::string lang;
    std::string source;
    std::string text;
    std::map<std::string, std::string> meta;

    bool operator==(const Document&) const = default;
};

// Per-stage retention accounting. removal_breakdown maps a filter/reason
// name to the number of documents it removed; the counts must add up to
// docs_in - docs_out. `extras` holds stage-specific counters (modified
// docs, emitted windows, ...) that are not removals.
struct StageStats {
    std::string stage;
    std::uint64_t docs_in = 0;
    std::uint64_t docs_out = 0;
    std::uint64_t bytes_in = 0;
    std::uint64_t bytes_out = 0;
    std::map<std::string, std::uint64_t> removal_breakdown;
    std::map<std::string, std::uint64_t> extras;

    double kept_rate() const {
        return docs_in == 0 ? 1.0 : static_cast<double>(docs_out) / static_cast<double>(docs_in);
    }
    double removal_rate() const { return 1.0 - kept_rate(); }
};

}  // namespace sift
