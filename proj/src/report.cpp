#include "textsift/report.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "textsift/corpus_io.hpp"

namespace sift {

RetentionReport chain_report(const std::vector<StageStats>& stages) {
    RetentionReport report;
    double cumulative = 1.0;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const StageStats& s = stages[i];
        if (i > 0 && stages[i - 1].docs_out != s.docs_in) {
            throw CorpusError("stage chain mismatch: \"" + stages[i - 1].stage + "\" emitted " +
                              std::to_string(stages[i - 1].docs_out) + " docs but \"" + s.stage +
                              "\" consumed " + std::to_string(s.docs_in));
        }
        StageRetention r;
        r.stage = s.stage;
        r.docs_in = s.docs_in;
        r.docs_out = s.docs_out;
        r.kept_rate = s.kept_rate();
        r.removal_rate = s.removal_rate();
        cumulative *= r.kept_rate;
        r.cumulative_kept = cumulative;
        report.stages.push_back(r);
    }
    report.overall_kept = cumulative;
    return report;
}

std::string format_report_table(const RetentionReport& report) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-16s %12s %12s %10s %10s %10s\n", "stage", "docs_in",
                  "docs_out", "removed%", "kept%", "overall%");
    out += buf;
    for (const StageRetention& r : report.stages) {
        std::snprintf(buf, sizeof(buf), "%-16s %12llu %12llu %9.2f%% %9.2f%% %9.2f%%\n",
                      r.stage.c_str(), static_cast<unsigned long long>(r.docs_in),
                      static_cast<unsigned long long>(r.docs_out), 100.0 * r.removal_rate,
                      100.0 * r.kept_rate, 100.0 * r.cumulative_kept);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "overall kept rate: %.4f\n", report.overall_kept);
    out += buf;
    return out;
}

void write_report_json(const RetentionReport& report, const std::string& path) {
    nlohmann::ordered_json j;
    j["stages"] = nlohmann::ordered_json::array();
    for (const StageRetention& r : report.stages) {
        nlohmann::ordered_json s;
        s["stage"] = r.stage;
        s["docs_in"] = r.docs_in;
        s["docs_out"] = r.docs_out;
        s["kept_rate"] = r.kept_rate;
        s["removal_rate"] = r.removal_rate;
        s["cumulative_kept"] = r.cumulative_kept;
        j["stages"].push_back(s);
    }
    j["overall_kept"] = report.overall_kept;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.is_open()) {
        throw CorpusError("cannot open report file for writing: " + path);
    }
    out << j.dump(2) << '\n';
}

}  // namespace sift
