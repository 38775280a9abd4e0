#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <vector>

#include "reader/core.hpp"

namespace reader {

// Local-history prefix tree with visit counts. Children enumerate in
// descending count order, ties by ascending token id.
class TrieStore {
 public:
  TrieStore() { nodes_.emplace_back(); }

  void insert(std::span<const TokenId> seq) {
    if (seq.empty()) throw input_error("trie insert: empty sequence");
    int cur = 0;
    nodes_[0].count += 1;
    for (TokenId t : seq) {
      auto it = nodes_[cur].children.find(t);
      int next;
      if (it == nodes_[cur].children.end()) {
        next = static_cast<int>(nodes_.size());
        nodes_[cur].children.emplace(t, next);
        nodes_.emplace_back();
      } else {
        next = it->second;
      }
      nodes_[next].count += 1;
      cur = next;
    }
  }

  // node index after descending with seq, or -1 if absent
  int find(std::span<const TokenId> seq) const {
    int cur = 0;
    for (TokenId t : seq) {
      auto it = nodes_[cur].children.find(t);
      if (it == nodes_[cur].children.end()) return -1;
      cur = it->second;
    }
    return cur;
  }

  std::uint64_t count_of(std::span<const TokenId> seq) const {
    const int n = find(seq);
    return n < 0 ? 0 : nodes_[n].count;
  }

  // (token, count) pairs in descending count order, ties ascending token
  std::vector<std::pair<TokenId, std::uint64_t>> ordered_children(int node) const {
    std::vector<std::pair<TokenId, std::uint64_t>> out;
    for (const auto& [tok, child] : nodes_[node].children)
      out.emplace_back(tok, nodes_[child].count);
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    return out;
  }

  int child(int node, TokenId tok) const {
    auto it = nodes_[node].children.find(tok);
    return it == nodes_[node].children.end() ? -1 : it->second;
  }

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    std::map<TokenId, int> children;
    std::uint64_t count = 0;
  };
  std::vector<Node> nodes_;
};

// A tree fragment rooted at a trie position: parents[0] is a virtual root
// standing for the matched suffix itself, so tokens[0] is unused.
struct TreeFragment {
  DraftTreeTemplate tmpl;
  std::vector<TokenId> tokens;

  bool empty() const { return tmpl.size() <= 1; }
};

// Depth-first extraction below the node reached by `suffix`, visiting
// children in descending count order, halted at max_depth / max_nodes
// (node budget counts extracted non-root nodes).
inline TreeFragment trie_subtree(const TrieStore& trie, std::span<const TokenId> suffix,
                                 int max_depth, int max_nodes) {
  TreeFragment frag;
  frag.tmpl.parents = {DraftTreeTemplate::kNoParent};
  frag.tokens = {kPadToken};
  const int start = trie.find(suffix);
  if (start < 0) return frag;

  // plain recursive DFS: a child is emitted, then its subtree, then the
  // next sibling, until either budget runs out
  auto dfs = [&](auto&& self, int trie_node, int frag_parent, int depth) -> void {
    if (depth >= max_depth) return;
    for (const auto& [tok, cnt] : trie.ordered_children(trie_node)) {
      if (static_cast<int>(frag.tokens.size()) - 1 >= max_nodes) return;
      frag.tmpl.parents.push_back(frag_parent);
      frag.tokens.push_back(tok);
      self(self, trie.child(trie_node, tok), static_cast<int>(frag.tokens.size()) - 1,
           depth + 1);
    }
  };
  dfs(dfs, start, 0, 0);
  return frag;
}

// Deepest root-to-leaf token path of a fragment, most-frequent-first on
// ties (lowest leaf index wins because extraction emits frequent children
// first).
inline std::vector<TokenId> fragment_deepest_branch(const TreeFragment& frag) {
  int best = 0, best_depth = 0;
  for (int i = 1; i < frag.tmpl.size(); ++i) {
    const int d = frag.tmpl.depth_of(i);
    if (d > best_depth) {
      best = i;
      best_depth = d;
    }
  }
  if (best == 0) return {};
  std::vector<TokenId> path;
  for (int n : frag.tmpl.path_to(best))
    if (n != 0) path.push_back(frag.tokens[n]);
  return path;
}

}  // namespace reader
