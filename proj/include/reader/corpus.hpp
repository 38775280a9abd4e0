#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "reader/core.hpp"
#include "reader/transformer.hpp"

namespace reader {

struct CorpusEntry {
  std::string prompt;
  std::string response;
};

// counter-based PRNG, identical on every platform
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() { return detail::splitmix64(state_++); }
  std::uint64_t below(std::uint64_t n) { return next() % n; }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

namespace corpus {

inline std::string word(std::uint64_t i) { return "w" + std::to_string(i); }

// First-order Markov text with injected verbatim repeats: with probability
// repeat_rate a previously emitted segment is copied instead of sampling.
inline std::vector<CorpusEntry> synth_markov(int entries, std::uint64_t seed,
                                             double repeat_rate = 0.3, int vocab = 80,
                                             int response_len = 80) {
  Rng rng(detail::splitmix64(seed) ^ 0x6d61726b6f76ull);
  // fixed successor table, 3 choices per word
  std::vector<std::array<int, 3>> next(vocab);
  for (int w = 0; w < vocab; ++w)
    for (int c = 0; c < 3; ++c) next[w][c] = static_cast<int>(rng.below(vocab));

  std::vector<CorpusEntry> out;
  for (int e = 0; e < entries; ++e) {
    std::vector<int> toks;
    int cur = static_cast<int>(rng.below(vocab));
    toks.push_back(cur);
    while (static_cast<int>(toks.size()) < response_len) {
      if (toks.size() > 12 && rng.uniform() < repeat_rate) {
        const std::size_t seg_len = 5 + rng.below(10);
        const std::size_t max_start = toks.size() > seg_len ? toks.size() - seg_len : 1;
        const std::size_t start = rng.below(max_start);
        for (std::size_t i = 0; i < seg_len && static_cast<int>(toks.size()) < response_len; ++i)
          toks.push_back(toks[start + i]);
      } else {
        cur = next[toks.back()][rng.below(3)];
        toks.push_back(cur);
      }
    }
    CorpusEntry entry;
    for (int i = 0; i < 8; ++i) {
      if (i) entry.prompt += ' ';
      entry.prompt += word(toks[i]);
    }
    for (std::size_t i = 8; i < toks.size(); ++i) {
      if (i > 8) entry.response += ' ';
      entry.response += word(toks[i]);
    }
    out.push_back(std::move(entry));
  }
  return out;
}

struct CopyTaskEntry {
  std::string document;
  std::string question;
  std::string response;  // verbatim substring of document
};

// RAG analog: the answer is a contiguous span of the document and the
// question quotes the span's first three words.
inline std::vector<CopyTaskEntry> synth_copy_task(int entries, std::uint64_t seed,
                                                  int vocab = 300, int doc_len = 100,
                                                  int span_len = 32) {
  Rng rng(detail::splitmix64(seed) ^ 0x636f7079ull);
  std::vector<CopyTaskEntry> out;
  for (int e = 0; e < entries; ++e) {
    std::vector<int> doc(doc_len);
    for (int& t : doc) t = static_cast<int>(rng.below(vocab));
    const int start = static_cast<int>(rng.below(doc_len - span_len));
    CopyTaskEntry entry;
    for (int i = 0; i < doc_len; ++i) {
      if (i) entry.document += ' ';
      entry.document += word(doc[i]);
    }
    entry.question = "find :";
    for (int i = 0; i < 3; ++i) entry.question += ' ' + word(doc[start + i]);
    for (int i = 3; i < span_len; ++i) {
      if (i > 3) entry.response += ' ';
      entry.response += word(doc[start + i]);
    }
    out.push_back(std::move(entry));
  }
  return out;
}

inline CorpusEntry to_prompt_response(const CopyTaskEntry& e) {
  return {e.document + " " + e.question, e.response};
}

inline void save_jsonl(const std::vector<CorpusEntry>& entries, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw input_error("cannot open for write: " + path);
  for (const auto& e : entries) {
    nlohmann::json j{{"prompt", e.prompt}, {"response", e.response}};
    f << j.dump() << '\n';
  }
}

inline void save_jsonl(const std::vector<CopyTaskEntry>& entries, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw input_error("cannot open for write: " + path);
  for (const auto& e : entries) {
    nlohmann::json j{{"document", e.document}, {"question", e.question}, {"response", e.response}};
    f << j.dump() << '\n';
  }
}

// Accepts both layouts: {"prompt","response"} and copy-task
// {"document","question","response"} (prompt = document + question).
inline std::vector<CorpusEntry> load_jsonl(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw input_error("cannot open: " + path);
  std::vector<CorpusEntry> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    CorpusEntry e;
    if (j.contains("document")) {
      e.prompt = j.at("document").get<std::string>() + " " + j.at("question").get<std::string>();
      e.response = j.at("response").get<std::string>();
    } else {
      e.prompt = j.at("prompt").get<std::string>();
      e.response = j.at("response").get<std::string>();
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace corpus
}  // namespace reader
