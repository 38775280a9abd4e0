#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "reader/core.hpp"

namespace reader {

// Immutable global datastore: documents concatenated with a separator
// sentinel after each, indexed by a lexicographically sorted suffix array.
class SuffixArrayStore {
 public:
  SuffixArrayStore() = default;

  static SuffixArrayStore build(const std::vector<std::vector<TokenId>>& docs,
                                int vocab = 0, std::size_t capacity = 0) {
    SuffixArrayStore s;
    s.vocab_ = vocab;
    for (const auto& d : docs) {
      s.tokens_.insert(s.tokens_.end(), d.begin(), d.end());
      s.tokens_.push_back(kDocSeparator);
    }
    if (capacity != 0 && s.tokens_.size() > capacity)
      throw capacity_error("datastore exceeds configured capacity");
    s.sa_.resize(s.tokens_.size());
    std::iota(s.sa_.begin(), s.sa_.end(), std::size_t{0});
    // naive comparison sort; fine below ~1e7 tokens
    const auto& toks = s.tokens_;
    std::sort(s.sa_.begin(), s.sa_.end(), [&toks](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(toks.begin() + a, toks.end(), toks.begin() + b,
                                          toks.end());
    });
    return s;
  }

  std::size_t size() const { return tokens_.size(); }
  int vocab() const { return vocab_; }
  const std::vector<TokenId>& tokens() const { return tokens_; }
  const std::vector<std::size_t>& suffix_array() const { return sa_; }

  // sa[lo..hi) are exactly the suffixes having `pattern` as a prefix
  std::pair<std::size_t, std::size_t> search(std::span<const TokenId> pattern) const {
    if (pattern.empty()) throw input_error("sa search: empty pattern");
    auto suffix_less_than_pattern = [&](std::size_t start) {
      // true iff tokens[start..] < pattern
      return std::lexicographical_compare(tokens_.begin() + start, tokens_.end(),
                                          pattern.begin(), pattern.end());
    };
    auto suffix_has_prefix = [&](std::size_t start) {
      if (tokens_.size() - start < pattern.size()) return false;
      return std::equal(pattern.begin(), pattern.end(), tokens_.begin() + start);
    };
    std::size_t lo = 0, hi = sa_.size();
    // lower bound: first suffix >= pattern
    {
      std::size_t a = 0, b = sa_.size();
      while (a < b) {
        const std::size_t mid = a + (b - a) / 2;
        if (suffix_less_than_pattern(sa_[mid])) a = mid + 1;
        else b = mid;
      }
      lo = a;
    }
    // upper bound: scan forward would be O(occ); binary search on prefix test
    {
      std::size_t a = lo, b = sa_.size();
      while (a < b) {
        const std::size_t mid = a + (b - a) / 2;
        if (suffix_has_prefix(sa_[mid])) a = mid + 1;
        else b = mid;
      }
      hi = a;
    }
    return {lo, hi};
  }

  // Greedy most-frequent continuation of `pattern`, length <= depth.
  // At each step the majority next token among surviving occurrences wins
  // (ties to the lowest id); occurrences that end or hit a separator drop out.
  Branch branch(std::span<const TokenId> pattern, int depth) const {
    if (depth < 1) throw input_error("sa branch: depth must be >= 1");
    Branch out;
    if (pattern.empty() || tokens_.empty()) return out;
    auto [lo, hi] = search(pattern);
    std::vector<std::size_t> occ;
    for (std::size_t i = lo; i < hi; ++i) occ.push_back(sa_[i]);
    std::size_t offset = pattern.size();
    for (int step = 0; step < depth; ++step) {
      std::map<TokenId, std::size_t> votes;
      for (std::size_t start : occ) {
        const std::size_t p = start + offset + step;
        if (p >= tokens_.size()) continue;
        const TokenId t = tokens_[p];
        if (t == kDocSeparator) continue;
        votes[t] += 1;
      }
      if (votes.empty()) break;
      TokenId best = votes.begin()->first;
      std::size_t best_count = votes.begin()->second;
      for (const auto& [tok, cnt] : votes) {
        if (cnt > best_count) {
          best = tok;
          best_count = cnt;
        }
      }
      out.tokens.push_back(best);
      std::vector<std::size_t> surviving;
      for (std::size_t start : occ) {
        const std::size_t p = start + offset + step;
        if (p < tokens_.size() && tokens_[p] == best) surviving.push_back(start);
      }
      occ = std::move(surviving);
    }
    return out;
  }

  // --- RDRS binary format: magic, version, vocab u32, count u64,
  //     tokens u32[], sa u64[] ---

  void save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open for write: " + path);
    f.write("RDRS", 4);
    write_u32(f, 1);
    write_u32(f, static_cast<std::uint32_t>(vocab_));
    write_u64(f, tokens_.size());
    for (TokenId t : tokens_) write_u32(f, static_cast<std::uint32_t>(t));
    for (std::size_t s : sa_) write_u64(f, s);
    if (!f) throw input_error("write failed: " + path);
  }

  static SuffixArrayStore load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw input_error("cannot open: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::string(magic, 4) != "RDRS") throw input_error("bad datastore magic");
    const std::uint32_t version = read_u32(f);
    if (version != 1) throw input_error("unsupported datastore version");
    SuffixArrayStore s;
    s.vocab_ = static_cast<int>(read_u32(f));
    const std::uint64_t count = read_u64(f);
    s.tokens_.resize(count);
    for (auto& t : s.tokens_) t = static_cast<TokenId>(read_u32(f));
    s.sa_.resize(count);
    for (auto& v : s.sa_) v = read_u64(f);
    if (!f) throw input_error("truncated datastore: " + path);
    return s;
  }

 private:
  static void write_u32(std::ostream& o, std::uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                 static_cast<char>(v >> 24)};
    o.write(b, 4);
  }
  static void write_u64(std::ostream& o, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) o.put(static_cast<char>(v >> (8 * i)));
  }
  static std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }
  static std::uint64_t read_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }

  int vocab_ = 0;
  std::vector<TokenId> tokens_;
  std::vector<std::size_t> sa_;
};

}  // namespace reader
