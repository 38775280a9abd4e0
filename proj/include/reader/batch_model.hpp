#pragma once

#include <memory>
#include <span>
#include <vector>

#include "reader/core.hpp"
#include "reader/kv_cache.hpp"
#include "reader/model.hpp"
#include "reader/transformer.hpp"

namespace reader {

// Batched verification contract the engine drives. Rows share one draft
// template per step. forward_tree stages per-node state; rejected nodes are
// simply never committed, so the cache only ever holds accepted tokens.
class BatchModel {
 public:
  virtual ~BatchModel() = default;
  virtual int vocab_size() const = 0;
  virtual int num_rows() const = 0;
  virtual const ScoringModel& scorer() const = 0;

  // batched context ingestion; shorter rows get PAD slots
  virtual void prefill(const std::vector<std::vector<TokenId>>& per_row) = 0;

  // trees[r] may be null for inactive rows
  virtual std::vector<std::vector<Distribution>> forward_tree(
      const std::vector<const DraftTree*>& trees, const AncestorMask& mask) = 0;

  // accepted[r] lists node ids (root first, then the accepted path) of the
  // last forwarded tree; their staged states become cache entries
  virtual void commit(const std::vector<std::vector<int>>& accepted) = 0;

  virtual void rearrange() {}
  virtual double cache_occupancy() const { return 1.0; }
  virtual std::size_t cache_width() const { return 0; }
};

// Cacheless adapter: per-row committed token vectors stand in for KV state.
class NGramBatchModel : public BatchModel {
 public:
  NGramBatchModel(const NGramModel& model, int rows) : model_(model), committed_(rows) {}

  int vocab_size() const override { return model_.vocab_size(); }
  int num_rows() const override { return static_cast<int>(committed_.size()); }
  const ScoringModel& scorer() const override { return model_; }

  void prefill(const std::vector<std::vector<TokenId>>& per_row) override {
    for (std::size_t r = 0; r < per_row.size(); ++r)
      committed_[r].insert(committed_[r].end(), per_row[r].begin(), per_row[r].end());
  }

  std::vector<std::vector<Distribution>> forward_tree(
      const std::vector<const DraftTree*>& trees, const AncestorMask&) override {
    std::vector<std::vector<Distribution>> out(trees.size());
    staged_ = trees;
    for (std::size_t r = 0; r < trees.size(); ++r) {
      if (!trees[r]) continue;
      const DraftTree& tree = *trees[r];
      out[r].resize(tree.size());
      for (int i = 0; i < tree.size(); ++i) {
        if (tree.tokens[i] == kPadToken) continue;  // PAD nodes are never consulted
        std::vector<TokenId> ctx = committed_[r];
        for (TokenId t : tree.path_tokens(i)) ctx.push_back(t);
        out[r][i] = model_.next_distribution(ctx);
      }
    }
    return out;
  }

  void commit(const std::vector<std::vector<int>>& accepted) override {
    for (std::size_t r = 0; r < accepted.size(); ++r) {
      if (accepted[r].empty()) continue;
      for (int node : accepted[r]) committed_[r].push_back(staged_[r]->tokens[node]);
    }
  }

  const std::vector<TokenId>& committed(int row) const { return committed_[row]; }

 private:
  const NGramModel& model_;
  std::vector<std::vector<TokenId>> committed_;
  std::vector<const DraftTree*> staged_;
};

// Real padded-KV-cache mechanics: one cache per layer, slot state = K|V.
// A draft node's position is committed_count(row) + depth(node); positions
// travel with their slots, so rearrange() never changes model output.
class TransformerBatchModel : public BatchModel {
 public:
  TransformerBatchModel(const TinyTransformer& model, int rows, std::size_t capacity = 0)
      : model_(model), committed_count_(rows, 0) {
    caches_.assign(model.dims().layers, PaddedKVCache(rows, capacity));
  }

  int vocab_size() const override { return model_.vocab_size(); }
  int num_rows() const override { return static_cast<int>(committed_count_.size()); }
  const ScoringModel& scorer() const override { return model_; }

  void prefill(const std::vector<std::vector<TokenId>>& per_row) override {
    const int rows = num_rows();
    // per layer, per row: entries to append in one batched call
    std::vector<std::vector<std::vector<PaddedKVCache::Entry>>> entries(
        caches_.size(), std::vector<std::vector<PaddedKVCache::Entry>>(rows));
    for (int r = 0; r < rows; ++r) {
      const auto& toks = per_row[r];
      if (toks.empty()) continue;
      const int n = static_cast<int>(toks.size());
      std::vector<int> positions(n);
      std::vector<std::vector<int>> attend(n);
      for (int i = 0; i < n; ++i) {
        positions[i] = committed_count_[r] + i;
        for (int j = 0; j <= i; ++j) attend[i].push_back(j);
      }
      TinyTransformer::StagedKV staged;
      model_.forward_row(toks, positions, attend, &caches_, r, &staged);
      for (std::size_t l = 0; l < caches_.size(); ++l)
        for (int i = 0; i < n; ++i)
          entries[l][r].push_back({positions[i], std::move(staged[l][i])});
      committed_count_[r] += n;
    }
    for (std::size_t l = 0; l < caches_.size(); ++l) caches_[l].append(entries[l]);
  }

  std::vector<std::vector<Distribution>> forward_tree(
      const std::vector<const DraftTree*>& trees, const AncestorMask& mask) override {
    const int rows = num_rows();
    std::vector<std::vector<Distribution>> out(rows);
    staged_trees_ = trees;
    staged_kv_.assign(rows, {});
    for (int r = 0; r < rows; ++r) {
      if (!trees[r]) continue;
      const DraftTree& tree = *trees[r];
      const int n = tree.size();
      std::vector<int> positions(n);
      std::vector<std::vector<int>> attend(n);
      for (int i = 0; i < n; ++i) {
        positions[i] = committed_count_[r] + tree.tmpl.depth_of(i);
        for (int j = 0; j <= i; ++j)
          if (mask.at(i, j)) attend[i].push_back(j);
      }
      out[r] = model_.forward_row(tree.tokens, positions, attend, &caches_, r, &staged_kv_[r]);
    }
    return out;
  }

  void commit(const std::vector<std::vector<int>>& accepted) override {
    const int rows = num_rows();
    std::vector<std::vector<std::vector<PaddedKVCache::Entry>>> entries(
        caches_.size(), std::vector<std::vector<PaddedKVCache::Entry>>(rows));
    for (int r = 0; r < rows; ++r) {
      for (int node : accepted[r]) {
        const int pos = committed_count_[r] + staged_trees_[r]->tmpl.depth_of(node);
        for (std::size_t l = 0; l < caches_.size(); ++l)
          entries[l][r].push_back({pos, staged_kv_[r][l][node]});
      }
    }
    for (std::size_t l = 0; l < caches_.size(); ++l) caches_[l].append(entries[l]);
    for (int r = 0; r < rows; ++r) committed_count_[r] += static_cast<int>(accepted[r].size());
  }

  void rearrange() override {
    for (auto& c : caches_) c.rearrange();
  }

  double cache_occupancy() const override { return caches_[0].occupancy(); }
  std::size_t cache_width() const override { return caches_[0].width(); }
  const PaddedKVCache& layer_cache(int l) const { return caches_[l]; }
  int committed_count(int row) const { return committed_count_[row]; }

 private:
  const TinyTransformer& model_;
  std::vector<PaddedKVCache> caches_;
  std::vector<int> committed_count_;
  std::vector<const DraftTree*> staged_trees_;
  std::vector<TinyTransformer::StagedKV> staged_kv_;
};

}  // namespace reader
