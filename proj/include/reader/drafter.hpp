#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "reader/core.hpp"
#include "reader/model.hpp"
#include "reader/suffix_array.hpp"
#include "reader/trie.hpp"

namespace reader {

struct SearchParams {
  int max_suffix_len = 8;
  int min_suffix_len = 2;
  int branch_depth = 16;
  int subtree_max_depth = 16;
  int subtree_max_nodes = 24;

  bool valid() const {
    return max_suffix_len >= min_suffix_len && min_suffix_len >= 1 && branch_depth >= 1;
  }
};

// Statistical drafter with suffix fallback: for suffix lengths from
// max_suffix_len down to min_suffix_len, try the local trie first (it holds
// the freshest self-generated text), then the datastore. First non-empty
// branch wins; branches are capped at branch_depth.
inline Branch stat_search(const TrieStore& trie, const SuffixArrayStore* datastore,
                          std::span<const TokenId> context, const SearchParams& params) {
  if (context.empty()) throw input_error("stat_search: empty context");
  if (!params.valid()) throw input_error("stat_search: invalid params");
  const int ctx_len = static_cast<int>(context.size());
  for (int len = std::min(params.max_suffix_len, ctx_len); len >= params.min_suffix_len; --len) {
    const auto suffix = context.subspan(context.size() - len);
    TreeFragment frag =
        trie_subtree(trie, suffix, params.subtree_max_depth, params.subtree_max_nodes);
    std::vector<TokenId> path = fragment_deepest_branch(frag);
    if (!path.empty()) {
      if (static_cast<int>(path.size()) > params.branch_depth)
        path.resize(params.branch_depth);
      return Branch{std::move(path), 0};
    }
    if (datastore) {
      Branch b = datastore->branch(suffix, params.branch_depth);
      if (!b.empty()) return b;
    }
  }
  return {};
}

// Model drafter: fills a fixed template layer by layer. Siblings under one
// parent get the top-c distinct candidates of the parent-path distribution,
// in descending score (ties to the lowest id), assigned in index order.
// Exactly max_depth(template) scoring sweeps over the batch of parents.
inline DraftTree model_draft(const ScoringModel& lm, std::span<const TokenId> context,
                             const DraftTreeTemplate& tmpl) {
  if (!template_ok(tmpl)) throw structural_error("model_draft: invalid template");
  if (context.empty()) throw input_error("model_draft: empty context");
  DraftTree tree;
  tree.tmpl = tmpl;
  tree.tokens.assign(tmpl.size(), kPadToken);
  tree.tokens[0] = context.back();

  const int depth = tmpl.max_depth();
  std::vector<int> node_depth(tmpl.size());
  for (int i = 0; i < tmpl.size(); ++i) node_depth[i] = tmpl.depth_of(i);

  std::vector<TokenId> ctx(context.begin(), context.end() - 1);  // root re-adds the last token
  for (int layer = 1; layer <= depth; ++layer) {
    // one sweep: score every parent that has children at this layer
    for (int parent = 0; parent < tmpl.size(); ++parent) {
      if (node_depth[parent] != layer - 1) continue;
      auto kids = tmpl.children_of(parent);
      if (kids.empty()) continue;
      if (static_cast<int>(kids.size()) > lm.vocab_size())
        throw input_error("model_draft: more siblings than vocabulary entries");
      std::vector<TokenId> full = ctx;
      for (TokenId t : tree.path_tokens(parent)) full.push_back(t);
      const Distribution d = lm.next_distribution(full);
      // top-c distinct argmax candidates, descending score, ties low id
      std::vector<TokenId> order(d.scores.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<TokenId>(i);
      std::stable_sort(order.begin(), order.end(), [&d](TokenId a, TokenId b) {
        return d.scores[a] > d.scores[b];
      });
      for (std::size_t c = 0; c < kids.size(); ++c) tree.tokens[kids[c]] = order[c];
    }
  }
  return tree;
}

}  // namespace reader
