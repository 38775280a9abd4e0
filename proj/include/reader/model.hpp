#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "reader/core.hpp"

namespace reader {

// Log-domain scores over the vocabulary. Argmax ties break to the lowest id.
struct Distribution {
  std::vector<float> scores;

  TokenId argmax() const {
    TokenId best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
      if (scores[i] > scores[best]) best = static_cast<TokenId>(i);
    return best;
  }
};

// The autoregressive scoring contract shared by every base/draft model:
// a pure function of the full context.
class ScoringModel {
 public:
  virtual ~ScoringModel() = default;
  virtual int vocab_size() const = 0;
  virtual Distribution next_distribution(std::span<const TokenId> context) const = 0;
};

// Count-based LM with add-alpha smoothing and longest-context backoff.
// Deterministic given (corpus, order, alpha); the desk-scale stand-in for
// a trained base model.
class NGramModel : public ScoringModel {
 public:
  NGramModel() = default;
  NGramModel(int order, int vocab, double alpha = 0.1)
      : order_(order), vocab_(vocab), alpha_(alpha), tables_(order) {}

  int order() const { return order_; }
  double alpha() const { return alpha_; }
  int vocab_size() const override { return vocab_; }

  void train_sequence(std::span<const TokenId> seq) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (seq[i] < 0 || seq[i] >= vocab_) throw input_error("ngram train: token out of vocab");
      for (int ctx_len = 0; ctx_len < order_; ++ctx_len) {
        if (i < static_cast<std::size_t>(ctx_len)) break;
        std::vector<TokenId> ctx(seq.begin() + (i - ctx_len), seq.begin() + i);
        tables_[ctx_len][ctx][seq[i]] += 1;
      }
    }
  }

  Distribution next_distribution(std::span<const TokenId> context) const override {
    if (context.empty()) throw input_error("ngram: empty context");
    for (TokenId t : context)
      if (t < 0 || t >= vocab_) throw input_error("ngram: token out of vocab");
    // longest seen context wins; the length-0 table always exists
    for (int ctx_len = std::min<int>(order_ - 1, static_cast<int>(context.size()));
         ctx_len >= 0; --ctx_len) {
      std::vector<TokenId> ctx(context.end() - ctx_len, context.end());
      auto it = tables_[ctx_len].find(ctx);
      if (it == tables_[ctx_len].end() && ctx_len > 0) continue;
      Distribution d;
      d.scores.assign(vocab_, 0.0f);
      std::uint64_t total = 0;
      if (it != tables_[ctx_len].end())
        for (const auto& [tok, cnt] : it->second) total += cnt;
      const double denom = static_cast<double>(total) + alpha_ * vocab_;
      for (TokenId v = 0; v < vocab_; ++v) {
        double cnt = 0.0;
        if (it != tables_[ctx_len].end()) {
          auto ct = it->second.find(v);
          if (ct != it->second.end()) cnt = static_cast<double>(ct->second);
        }
        d.scores[v] = static_cast<float>(std::log((cnt + alpha_) / denom));
      }
      return d;
    }
    throw structural_error("ngram: unreachable backoff");
  }

  using CountTable = std::map<std::vector<TokenId>, std::map<TokenId, std::uint64_t>>;
  const std::vector<CountTable>& tables() const { return tables_; }
  std::vector<CountTable>& tables() { return tables_; }

 private:
  int order_ = 2;
  int vocab_ = 0;
  double alpha_ = 0.1;
  std::vector<CountTable> tables_;
};

}  // namespace reader
