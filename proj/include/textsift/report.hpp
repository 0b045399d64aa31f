#pragma once

#include <string>
#include <vector>

#include "textsift/document.hpp"

namespace sift {

struct StageRetention {
    std::string stage;
    std::uint64_t docs_in = 0;
    std::uint64_t docs_out = 0;
    double kept_rate = 1.0;       // w.r.t. the previous stage
    double removal_rate = 0.0;
    double cumulative_kept = 1.0; // w.r.t. the first stage's input
};

struct RetentionReport {
    std::vector<StageRetention> stages;
    double overall_kept = 1.0;  // product of per-stage kept rates
};

// Builds the retention report for an ordered stage chain. Throws
// CorpusError when docs_in of stage k+1 differs from docs_out of stage k.
RetentionReport chain_report(const std::vector<StageStats>& stages);

std::string format_report_table(const RetentionReport& report);
void write_report_json(const RetentionReport& report, const std::string& path);

}  // namespace sift
