#include "textsift/dedup.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "textsift/hash.hpp"

namespace sift {

UnionFind::UnionFind(std::size_t n) : parent_(n) {
    for (std::size_t i = 0; i < n; ++i) {
        parent_[i] = static_cast<std::uint32_t>(i);
    }
}

std::size_t UnionFind::find(std::size_t x) const {
    std::size_t root = x;
    while (parent_[root] != root) {
        root = parent_[root];
    }
    while (parent_[x] != root) {
        const std::size_t next = parent_[x];
        parent_[x] = static_cast<std::uint32_t>(root);
        x = next;
    }
    return root;
}

void UnionFind::unite(std::size_t x, std::size_t y) {
    const std::size_t rx = find(x);
    const std::size_t ry = find(y);
    if (rx == ry) {
        return;
    }
    // Smaller position wins so the root is the earliest document.
    if (rx < ry) {
        parent_[ry] = static_cast<std::uint32_t>(rx);
    } else {
        parent_[rx] = static_cast<std::uint32_t>(ry);
    }
}

namespace {

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n < 2 * workers) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                fn(i);
            }
        });
    }
    for (std::thread& t : threads) {
        t.join();
    }
}

std::uint64_t band_key(const MinHashSignature& sig, std::size_t band, std::size_t rows) {
    const char* bytes = reinterpret_cast<const char*>(sig.slots.data() + band * rows);
    return fnv1a64(std::string_view(bytes, rows * sizeof(std::uint64_t)),
                   0xcbf29ce484222325ULL ^ (band * 0x9e3779b97f4a7c15ULL));
}

}  // namespace

DedupResult dedup_corpus(const std::vector<Document>& corpus, const DedupConfig& config,
                         const SegmenterConfig& segmenter) {
    config.params.validate();
    if (config.chunk_size < 1 || config.rounds < 1) {
        throw std::invalid_argument("dedup config: chunk_size and rounds must be >= 1");
    }
    {
        std::unordered_set<std::string> ids;
        ids.reserve(corpus.size());
        for (const Document& doc : corpus) {
            if (!ids.insert(doc.id).second) {
                throw std::invalid_argument("duplicate document id: " + doc.id);
            }
        }
    }

    DedupResult result;
    result.stats.stage = "dedup";
    result.stats.docs_in = corpus.size();
    for (const Document& doc : corpus) {
        result.stats.bytes_in += doc.text.size();
    }
    if (corpus.empty()) {
        result.cluster_of.clear();
        return result;
    }

    // Signatures are a pure function of the document, computed once.
    const MinHasher hasher(config.params.num_perm, config.seed);
    std::vector<MinHashSignature> signatures(corpus.size());
    parallel_for(corpus.size(), config.workers, [&](std::size_t i) {
        const auto words = segment_words(corpus[i].text, corpus[i].lang, segmenter);
        signatures[i] = hasher.compute(shingles(words, config.shingle_n));
    });

    UnionFind clusters(corpus.size());
    std::vector<std::size_t> active(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        active[i] = i;
    }
    std::vector<std::size_t> removal_round(corpus.size(), 0);

    const std::size_t bands = config.params.bands;
    const std::size_t rows = config.params.rows;

    for (std::size_t round = 1; round <= config.rounds; ++round) {
        // Round 1 keeps corpus order; later rounds reshuffle the chunk
        // assignment so duplicates split across chunks can meet.
        std::vector<std::size_t> order = active;
        if (round > 1) {
            Rng rng(derive_seed(config.seed, "dedup_round", round));
            for (std::size_t i = order.size(); i > 1; --i) {
                std::swap(order[i - 1], order[rng.next_below(i)]);
            }
        }

        for (std::size_t chunk_start = 0; chunk_start < order.size();
             chunk_start += config.chunk_size) {
            const std::size_t chunk_end =
                std::min(order.size(), chunk_start + config.chunk_size);
            for (std::size_t band = 0; band < bands; ++band) {
                std::unordered_map<std::uint64_t, std::vector<std::size_t>> table;
                table.reserve(chunk_end - chunk_start);
                for (std::size_t k = chunk_start; k < chunk_end; ++k) {
                    table[band_key(signatures[order[k]], band, rows)].push_back(order[k]);
                }
                for (const auto& [key, bucket] : table) {
                    if (bucket.size() < 2) {
                        continue;
                    }
                    if (!config.verify_estimates) {
                        for (std::size_t k = 1; k < bucket.size(); ++k) {
                            clusters.unite(bucket[0], bucket[k]);
                        }
                        continue;
                    }
                    for (std::size_t k = 1; k < bucket.size(); ++k) {
                        for (std::size_t j = 0; j < k; ++j) {
                            if (estimate_jaccard(signatures[bucket[k]], signatures[bucket[j]]) >=
                                config.params.threshold) {
                                clusters.unite(bucket[j], bucket[k]);
                                break;
                            }
                        }
                    }
                }
            }
        }

        // Keep only cluster representatives (earliest corpus position).
        std::vector<std::size_t> survivors;
        survivors.reserve(active.size());
        std::size_t removed_this_round = 0;
        for (std::size_t idx : active) {
            if (clusters.find(idx) == idx) {
                survivors.push_back(idx);
            } else {
                removal_round[idx] = round;
                ++removed_this_round;
            }
        }
        result.stats.removal_breakdown["round_" + std::to_string(round)] = removed_this_round;
        result.rounds_run = round;
        const double removed_fraction =
            active.empty() ? 0.0
                           : static_cast<double>(removed_this_round) /
                                 static_cast<double>(active.size());
        active = std::move(survivors);
        // Round 1 chunks in corpus order, so a quiet first round says
        // nothing about cross-chunk duplicates; only shuffled rounds may
        // declare convergence.
        if (round > 1 && removed_fraction < config.convergence_fraction) {
            break;
        }
    }

    result.cluster_of.resize(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        result.cluster_of[i] = clusters.find(i);
    }
    result.kept.reserve(active.size());
    for (std::size_t idx : active) {
        result.kept.push_back(corpus[idx]);
        result.stats.bytes_out += corpus[idx].text.size();
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (removal_round[i] != 0) {
            result.removed.push_back(
                {corpus[i].id, corpus[result.cluster_of[i]].id, removal_round[i]});
        }
    }
    result.stats.docs_out = result.kept.size();
    result.stats.extras["rounds_run"] = result.rounds_run;
    return result;
}

void write_cluster_map(const DedupResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out.is_open()) {
        throw std::runtime_error("cannot open cluster map file for writing: " + path);
    }
    for (const RemovedDoc& removed : result.removed) {
        out << removed.id << '\t' << removed.representative_id << '\t' << removed.round << '\n';
    }
}

}  // namespace sift
