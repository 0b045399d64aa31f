#include "textsift/bpe.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "textsift/hash.hpp"

namespace sift {

BpeModel::BpeModel() {
    vocab_.reserve(kByteAlphabet);
    for (std::size_t b = 0; b < kByteAlphabet; ++b) {
        std::string token(1, static_cast<char>(b));
        token_ids_[token] = static_cast<TokenId>(b);
        vocab_.push_back(std::move(token));
    }
}

BpeModel::TokenId BpeModel::intern(const std::string& token) {
    const auto [it, inserted] = token_ids_.try_emplace(token, static_cast<TokenId>(vocab_.size()));
    if (inserted) {
        vocab_.push_back(token);
    }
    return it->second;
}

std::vector<std::string> BpeModel::pretokenize(const std::string& text) {
    std::vector<std::string> pretokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t start = pos;
        while (pos < text.size() && text[pos] == ' ') {
            ++pos;
        }
        while (pos < text.size() && text[pos] != ' ') {
            ++pos;
        }
        pretokens.emplace_back(text, start, pos - start);
    }
    return pretokens;
}

BpeModel BpeModel::train(const std::vector<std::string>& corpus, std::size_t vocab_size) {
    BpeModel model;
    std::unordered_map<std::string, std::uint64_t> word_freq;
    std::uint64_t total_bytes = 0;
    for (const std::string& text : corpus) {
        total_bytes += text.size();
        for (std::string& pretoken : pretokenize(text)) {
            ++word_freq[pretoken];
        }
    }
    if (total_bytes == 0) {
        throw std::invalid_argument("cannot train BPE on an empty corpus");
    }

    std::vector<std::pair<std::vector<TokenId>, std::uint64_t>> words;
    words.reserve(word_freq.size());
    for (const auto& [word, freq] : word_freq) {
        std::vector<TokenId> symbols;
        symbols.reserve(word.size());
        for (char c : word) {
            symbols.push_back(static_cast<TokenId>(static_cast<std::uint8_t>(c)));
        }
        words.emplace_back(std::move(symbols), freq);
    }

    while (model.vocab_.size() < vocab_size) {
        std::map<std::pair<TokenId, TokenId>, std::uint64_t> pair_counts;
        for (const auto& [symbols, freq] : words) {
            for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
                pair_counts[{symbols[i], symbols[i + 1]}] += freq;
            }
        }
        std::pair<TokenId, TokenId> best{};
        std::uint64_t best_count = 0;
        for (const auto& [pair, count] : pair_counts) {
            if (count < best_count) {
                continue;
            }
            if (count > best_count) {
                best = pair;
                best_count = count;
                continue;
            }
            // Lexicographic tie-break on the byte strings.
            const auto lhs = std::tie(model.vocab_[pair.first], model.vocab_[pair.second]);
            const auto rhs = std::tie(model.vocab_[best.first], model.vocab_[best.second]);
            if (lhs < rhs) {
                best = pair;
            }
        }
        if (best_count < 2) {
            break;  // no pair repeats
        }
        const std::string merged_str = model.vocab_[best.first] + model.vocab_[best.second];
        const TokenId merged = model.intern(merged_str);
        model.merges_.push_back({best.first, best.second, merged});
        for (auto& [symbols, freq] : words) {
            std::size_t write = 0;
            for (std::size_t read = 0; read < symbols.size(); ++read) {
                if (read + 1 < symbols.size() && symbols[read] == best.first &&
                    symbols[read + 1] == best.second) {
                    symbols[write++] = merged;
                    ++read;
                } else {
                    symbols[write++] = symbols[read];
                }
            }
            symbols.resize(write);
        }
    }
    return model;
}

void BpeModel::apply_merges(std::vector<TokenId>& symbols, double dropout_p, Rng* rng) const {
    for (const Merge& merge : merges_) {
        if (symbols.size() < 2) {
            break;
        }
        std::size_t write = 0;
        std::size_t read = 0;
        bool changed = false;
        while (read < symbols.size()) {
            if (read + 1 < symbols.size() && symbols[read] == merge.left &&
                symbols[read + 1] == merge.right &&
                !(rng != nullptr && rng->bernoulli(dropout_p))) {
                symbols[write++] = merge.result;
                read += 2;
                changed = true;
            } else {
                symbols[write++] = symbols[read++];
            }
        }
        if (changed) {
            symbols.resize(write);
        }
    }
}

std::vector<BpeModel::TokenId> BpeModel::segment(const std::string& text,
                                                 const SegmentationOptions& options) const {
    if (options.dropout_p < 0.0 || options.dropout_p > 1.0) {
        throw std::invalid_argument("dropout_p must be in [0,1]");
    }
    Rng rng(options.seed);
    Rng* rng_ptr = options.dropout_p > 0.0 ? &rng : nullptr;
    std::vector<TokenId> out;
    out.reserve(text.size() / 3 + 1);
    std::vector<TokenId> symbols;
    for (const std::string& pretoken : pretokenize(text)) {
        symbols.clear();
        symbols.reserve(pretoken.size());
        for (char c : pretoken) {
            symbols.push_back(static_cast<TokenId>(static_cast<std::uint8_t>(c)));
        }
        apply_merges(symbols, options.dropout_p, rng_ptr);
        out.insert(out.end(), symbols.begin(), symbols.end());
    }
    return out;
}

std::string BpeModel::detokenize(const std::vector<TokenId>& tokens) const {
    std::string out;
    for (TokenId id : tokens) {
        if (id >= vocab_.size()) {
            throw std::out_of_range("token id " + std::to_string(id) + " not in vocabulary");
        }
        out += vocab_[id];
    }
    return out;
}

const std::string& BpeModel::token_string(TokenId id) const {
    if (id >= vocab_.size()) {
        throw std::out_of_range("token id " + std::to_string(id) + " not in vocabulary");
    }
    return vocab_[id];
}

std::uint64_t BpeModel::fingerprint() const {
    std::uint64_t h = fnv1a64("textsift-bpe");
    for (const Merge& merge : merges_) {
        h = fnv1a64(vocab_[merge.left], h);
        h = fnv1a64("\x1f", h);
        h = fnv1a64(vocab_[merge.right], h);
        h = fnv1a64("\x1e", h);
    }
    return h;
}

namespace {

std::string escape_token(const std::string& token) {
    std::string out;
    out.reserve(token.size());
    for (char c : token) {
        const auto b = static_cast<std::uint8_t>(c);
        if (b < 0x21 || b > 0x7E || c == '\\') {
            char buf[5];
            std::snprintf(buf, sizeof(buf), "\\x%02X", b);
            out += buf;
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::string unescape_token(const std::string& escaped, const std::string& context) {
    std::string out;
    out.reserve(escaped.size());
    std::size_t pos = 0;
    while (pos < escaped.size()) {
        if (escaped[pos] != '\\') {
            out.push_back(escaped[pos++]);
            continue;
        }
        if (pos + 3 >= escaped.size() || escaped[pos + 1] != 'x') {
            throw std::runtime_error("malformed escape in " + context + ": " + escaped);
        }
        const std::string hex = escaped.substr(pos + 2, 2);
        out.push_back(static_cast<char>(std::stoul(hex, nullptr, 16)));
        pos += 4;
    }
    return out;
}

}  // namespace

void BpeModel::save(const std::string& merges_path, const std::string& vocab_path) const {
    std::ofstream merges(merges_path, std::ios::binary | std::ios::trunc);
    if (!merges.is_open()) {
        throw std::runtime_error("cannot open merges file for writing: " + merges_path);
    }
    for (const Merge& merge : merges_) {
        merges << escape_token(vocab_[merge.left]) << ' ' << escape_token(vocab_[merge.right])
               << '\n';
    }
    std::ofstream vocab(vocab_path, std::ios::binary | std::ios::trunc);
    if (!vocab.is_open()) {
        throw std::runtime_error("cannot open vocab file for writing: " + vocab_path);
    }
    for (std::size_t id = 0; id < vocab_.size(); ++id) {
        vocab << escape_token(vocab_[id]) << '\t' << id << '\n';
    }
}

BpeModel BpeModel::load(const std::string& merges_path, const std::string& vocab_path) {
    BpeModel model;
    {
        std::ifstream vocab(vocab_path, std::ios::binary);
        if (!vocab.is_open()) {
            throw std::runtime_error("cannot open vocab file: " + vocab_path);
        }
        std::string line;
        while (std::getline(vocab, line)) {
            if (line.empty()) {
                continue;
            }
            const std::size_t tab = line.find('\t');
            if (tab == std::string::npos) {
                throw std::runtime_error("malformed vocab line: " + line);
            }
            const std::string token = unescape_token(line.substr(0, tab), "vocab file");
            const TokenId id = static_cast<TokenId>(std::stoul(line.substr(tab + 1)));
            if (id < kByteAlphabet) {
                continue;  // base alphabet is implicit
            }
            if (id != model.vocab_.size()) {
                throw std::runtime_error("vocab ids must be dense and in order: " + line);
            }
            model.token_ids_[token] = id;
            model.vocab_.push_back(token);
        }
    }
    {
        std::ifstream merges(merges_path, std::ios::binary);
        if (!merges.is_open()) {
            throw std::runtime_error("cannot open merges file: " + merges_path);
        }
        std::string line;
        while (std::getline(merges, line)) {
            if (line.empty()) {
                continue;
            }
            const std::size_t space = line.find(' ');
            if (space == std::string::npos) {
                throw std::runtime_error("malformed merges line: " + line);
            }
            const std::string left = unescape_token(line.substr(0, space), "merges file");
            const std::string right = unescape_token(line.substr(space + 1), "merges file");
            const auto left_it = model.token_ids_.find(left);
            const auto right_it = model.token_ids_.find(right);
            const auto result_it = model.token_ids_.find(left + right);
            if (left_it == model.token_ids_.end() || right_it == model.token_ids_.end() ||
                result_it == model.token_ids_.end()) {
                throw std::runtime_error("merge references unknown token: " + line);
            }
            model.merges_.push_back({left_it->second, right_it->second, result_it->second});
        }
    }
    return model;
}

}  // namespace sift
