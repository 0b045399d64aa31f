#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "textsift/document.hpp"
#include "textsift/lsh.hpp"
#include "textsift/minhash.hpp"
#include "textsift/segment.hpp"

namespace sift {

// Disjoint-set forest over corpus positions. The root of every cluster is
// its smallest (earliest) position, which is also the kept representative.
class UnionFind {
  public:
    explicit UnionFind(std::size_t n);

    std::size_t find(std::size_t x) const;
    void unite(std::size_t x, std::size_t y);
    std::size_t size() const { return parent_.size(); }

  private:
    mutable std::vector<std::uint32_t> parent_;
};

struct DedupConfig {
    LshParams params;                    // from make_lsh_params / optimal_param
    std::size_t shingle_n = 5;
    std::size_t chunk_size = 100000;     // documents per chunk
    std::size_t rounds = 3;
    std::uint64_t seed = 0;
    bool verify_estimates = false;       // second-pass estimate >= threshold check
    double convergence_fraction = 0.001; // stop when a round removes less than this
    std::size_t workers = 1;
};

struct RemovedDoc {
    std::string id;
    std::string representative_id;
    std::size_t round = 0;  // 1-based round that removed it
};

struct DedupResult {
    std::vector<Document> kept;     // original relative order
    std::vector<RemovedDoc> removed;
    StageStats stats;               // removal_breakdown keyed "round_<k>"
    std::size_t rounds_run = 0;

    // Cluster partition over corpus positions (same cluster id = duplicates;
    // the cluster id is the representative's corpus position).
    std::vector<std::size_t> cluster_of;
};

// Multi-round chunked MinHashLSH near-duplicate removal. Signatures are
// computed once; each round partitions the surviving documents into chunks
// (corpus order in round 1, seeded shuffle afterwards so cross-chunk
// duplicates meet), collides band keys within each chunk, unions the
// matches and keeps each cluster's earliest document.
DedupResult dedup_corpus(const std::vector<Document>& corpus, const DedupConfig& config,
                         const SegmenterConfig& segmenter = {});

// Writes "removed_id<TAB>representative_id<TAB>round" lines.
void write_cluster_map(const DedupResult& result, const std::string& path);

}  // namespace sift
