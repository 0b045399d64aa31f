#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "textsift/dedup.hpp"
#include "textsift/document.hpp"
#include "textsift/filters.hpp"
#include "textsift/normalize.hpp"
#include "textsift/pack.hpp"
#include "textsift/segment.hpp"

namespace sift {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Everything a batch run needs, loaded from one JSON config file. All
// randomness derives from the single global seed.
struct PipelineConfig {
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    bool strict = true;

    SegmenterConfig segmenter;
    NormalizeConfig normalize;

    // clean stage
    std::optional<FilterConfig> default_filter;
    std::map<std::string, FilterConfig> filters_by_lang;
    std::string langid_model_path;
    std::map<std::string, std::string> lm_paths;  // lang -> model file
    bool use_sidecar = true;

    // dedup stage (bands/rows 0 = solve with optimal_param)
    double dedup_threshold = 0.7;
    std::size_t dedup_num_perm = 256;
    std::size_t dedup_bands = 0;
    std::size_t dedup_rows = 0;
    std::size_t dedup_chunk_size = 100000;
    std::size_t dedup_rounds = 3;
    std::size_t dedup_shingle_n = 5;
    bool dedup_verify_estimates = false;

    // merge / codeswitch / pack
    PackConfig pack;
    std::map<std::string, std::string> cs_lexicon_paths;  // lang -> lexicon file
    std::string bpe_merges_path;
    std::string bpe_vocab_path;

    std::vector<std::string> stages;  // for the `pipeline` command

    static PipelineConfig load(const std::string& path);
};

extern const std::vector<std::string> kStageNames;  // normalize..pack

// Executes exactly one stage: reads the corpus at in_path, writes the
// result to out_path (a windows file for `pack`, a corpus otherwise) and
// returns the stage stats. `dedup` also writes out_path + ".clusters.tsv".
StageStats run_stage(const std::string& stage, const PipelineConfig& config,
                     const std::string& in_path, const std::string& out_path);

}  // namespace sift
