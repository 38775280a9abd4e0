#pragma once

#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "reader/core.hpp"

namespace reader {

// Whitespace-delimited word tokenizer; punctuation characters split off as
// their own tokens. Id 0 is UNK, id 1 is the end-of-sequence marker.
class Tokenizer {
 public:
  static constexpr TokenId kUnk = kUnkToken;
  static constexpr TokenId kEos = 1;

  Tokenizer() {
    add("<unk>");
    add("</s>");
  }

  static std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> words;
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) {
        words.push_back(cur);
        cur.clear();
      }
    };
    for (char c : text) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        flush();
      } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'') {
        cur.push_back(c);
      } else {
        flush();
        words.push_back(std::string(1, c));
      }
    }
    flush();
    return words;
  }

  void learn(const std::string& text) {
    for (const auto& w : split_words(text))
      if (!ids_.count(w)) add(w);
  }

  std::vector<TokenId> tokenize(const std::string& text) const {
    std::vector<TokenId> out;
    for (const auto& w : split_words(text)) {
      auto it = ids_.find(w);
      out.push_back(it == ids_.end() ? kUnk : it->second);
    }
    return out;
  }

  std::string detokenize(std::span<const TokenId> tokens) const {
    std::string out;
    for (TokenId t : tokens) {
      if (!out.empty()) out += ' ';
      out += (t >= 0 && t < static_cast<TokenId>(words_.size())) ? words_[t] : "<unk>";
    }
    return out;
  }

  int vocab_size() const { return static_cast<int>(words_.size()); }
  const std::vector<std::string>& words() const { return words_; }

  void set_vocab(std::vector<std::string> words) {
    words_ = std::move(words);
    ids_.clear();
    for (std::size_t i = 0; i < words_.size(); ++i)
      ids_[words_[i]] = static_cast<TokenId>(i);
  }

 private:
  void add(const std::string& w) {
    ids_[w] = static_cast<TokenId>(words_.size());
    words_.push_back(w);
  }

  std::map<std::string, TokenId> ids_;
  std::vector<std::string> words_;
};

}  // namespace reader
